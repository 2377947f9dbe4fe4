#include "isodyn/period.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "isodyn/isochrony.hpp"
#include "isodyn/numerics.hpp"

namespace isodyn {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_admissible(const ForceModel& model, double x0, const char* who) {
    model.require_in_domain(x0, who);
    if (!(x0 > 0.0))
        throw ValidationError(std::string(who) + ": amplitude must be positive");
    const double v = model.V(x0);
    if (!(v > 0.0 && v < model.center().e_max))
        throw ValidationError(std::string(who) + ": amplitude x0=" + fmt(x0) +
                              " outside the center bound (V=" + fmt(v) +
                              ", e_max=" + fmt(model.center().e_max) + ")");
}

} // namespace

PeriodSample period(const ForceModel& model, double x0, double quad_abs_tol) {
    require_admissible(model, x0, "period");

    const double y0 = u_map(model, x0);
    const double sqrt_ddV0 = std::sqrt(model.ddV0());
    const double r_tiny = 1e-9 * y0;

    auto uinv_prime = [&](double r) {
        if (std::abs(r) < r_tiny) return 1.0 / sqrt_ddV0;
        const double x = u_inverse(model, r);
        const double gx = model.g(x);
        if (gx == 0.0)
            throw NumericsError("period: u' vanished away from 0 at x=" + fmt(x) +
                                " (model invalid)");
        return r / gx;
    };
    auto integrand = [&](double s) {
        const double r = y0 * std::sin(s);
        return uinv_prime(r) + uinv_prime(-r);
    };

    const num::Quadrature q =
        num::integrate(integrand, 0.0, 0.5 * std::numbers::pi, quad_abs_tol, 2);

    PeriodSample sample;
    sample.x0 = x0;
    sample.y0 = y0;
    sample.T = 2.0 * q.value;
    sample.quadrature_error_estimate = 2.0 * q.error_estimate;
    return sample;
}

double period_raw(const ForceModel& model, double x0, double quad_abs_tol) {
    require_admissible(model, x0, "period_raw");
    const double v0 = model.V(x0);
    const double h0 = involution(model, x0).h_x;

    // x = a sin(phi) regularizes the turning-point singularity at x = a
    auto side = [&](double a) {
        auto f = [&](double phi) {
            const double x = a * std::sin(phi);
            const double w = v0 - model.V(x);
            if (w <= 0.0) return std::sqrt(std::abs(a) / std::abs(model.g(a)));
            return std::abs(a) * std::cos(phi) / std::sqrt(2.0 * w);
        };
        return num::integrate(f, 0.0, 0.5 * std::numbers::pi, quad_abs_tol, 6).value;
    };
    return 2.0 * (side(x0) + side(h0));
}

double period_derivative(const ForceModel& model, double x0, double quad_abs_tol) {
    require_admissible(model, x0, "period_derivative");
    const double x_adm = 0.995 * model.center().x_max_pos;
    const double room = std::min(0.45 * (x_adm - x0), 0.45 * x0);
    const double step =
        std::min(0.01 * std::max(x0, 0.05 * model.center().x_max_pos), room);
    if (!(step > 1e-8 * x0))
        throw NumericsError("period_derivative: step underflow, x0=" + fmt(x0) +
                            " too close to the admissible boundary");

    auto T = [&](double x) { return period(model, x, quad_abs_tol).T; };
    const double d_half = T(x0 + 0.5 * step) - T(x0 - 0.5 * step);
    const double d_full = T(x0 + step) - T(x0 - step);
    return (8.0 * d_half - d_full) / (6.0 * step);
}

PeriodScan period_scan(const ForceModel& model, double x_lo, double x_hi, int n,
                       double quad_abs_tol) {
    if (!(0.0 < x_lo && x_lo < x_hi))
        throw ValidationError("period_scan: need 0 < x_lo < x_hi");
    if (n < 8) throw ValidationError("period_scan: need n >= 8");
    require_admissible(model, x_hi, "period_scan");

    PeriodScan scan;
    scan.model_ref = model.name();
    scan.samples.reserve(n);
    const double ratio = x_lo / x_hi;
    for (int k = n - 1; k >= 0; --k) {
        const double x = x_hi * std::pow(ratio, double(k) / (n - 1));
        PeriodSample s = period(model, x, quad_abs_tol);
        s.T_prime = period_derivative(model, x, quad_abs_tol);
        scan.samples.push_back(s);
    }

    for (std::size_t i = 0; i + 1 < scan.samples.size(); ++i) {
        const double tp0 = *scan.samples[i].T_prime;
        const double tp1 = *scan.samples[i + 1].T_prime;
        if (!(tp0 * tp1 < 0.0)) continue;
        double lo = scan.samples[i].x0, hi = scan.samples[i + 1].x0;
        double f_lo = tp0;
        while (hi - lo > 1e-6 * hi) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = period_derivative(model, mid, quad_abs_tol);
            if ((f_mid > 0) == (f_lo > 0)) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        scan.critical_amplitudes.push_back(0.5 * (lo + hi));
    }
    return scan;
}

} // namespace isodyn
