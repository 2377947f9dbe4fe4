#include "isodyn/hill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "isodyn/dynamics.hpp"
#include "isodyn/isochrony.hpp"
#include "isodyn/numerics.hpp"
#include "isodyn/period.hpp"

namespace isodyn {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

using State6 = std::array<double, 6>;

num::OdeRhs<6> variational_rhs(const ForceModel& model) {
    return [&model](double, const State6& y, State6& dy) {
        const double k = model.dg(y[0]);
        dy[0] = y[1];
        dy[1] = -model.g(y[0]);
        dy[2] = y[3];
        dy[3] = -k * y[2];
        dy[4] = y[5];
        dy[5] = -k * y[4];
    };
}

double wronskian_defect(const State6& y) {
    return std::abs(y[5] * y[2] - y[3] * y[4] - 1.0);
}

} // namespace

std::string to_string(BundleVerdict v) {
    return v == BundleVerdict::PeriodicBundle ? "PeriodicBundle" : "UnboundedBundle";
}

std::string to_string(Classification c) {
    return c == Classification::StableIsochronous ? "Stable_Isochronous" : "WeaklyUnstable";
}

PhasePoint2 reference_orbit(const ForceModel& model, double x0, double t) {
    model.require_in_domain(x0, "reference_orbit");
    if (!std::isfinite(t)) throw ValidationError("reference_orbit: t must be finite");
    const PhasePoint2 start{x0, 0.0};
    const PhasePoint2 end = integrate_planar(model, start, t);
    const double e0 = model.V(x0);
    const double e1 = 0.5 * end.v * end.v + model.V(end.x);
    if (std::abs(e1 - e0) > 1e-10 * std::max(1.0, std::abs(e0)))
        throw NumericsError("reference_orbit: energy drift " + fmt(e1 - e0) +
                            " exceeds tolerance");
    return end;
}

MonodromyResult monodromy(const ForceModel& model, double x0, double ode_tol) {
    const double tau = period(model, x0).T;

    MonodromyResult res;
    res.x0 = x0;
    res.tau = tau;

    double tol = ode_tol;
    for (int attempt = 0; attempt <= 6; ++attempt) {
        double wmax = 0.0;
        num::OdeOptions opt;
        opt.rtol = tol;
        opt.atol = tol;
        const State6 y0{x0, 0.0, 1.0, 0.0, 0.0, 1.0};
        const State6 yT = num::integrate_ode<6>(
            variational_rhs(model), y0, 0.0, tau, opt,
            [&wmax](double, const State6& y) { wmax = std::max(wmax, wronskian_defect(y)); });
        res.phi_tau = yT[2];
        res.phidot_tau = yT[3];
        res.psi_tau = yT[4];
        res.psidot_tau = yT[5];
        res.wronskian_residual = std::max(wmax, wronskian_defect(yT));
        if (res.wronskian_residual <= 1e-8) break;
        if (attempt == 6)
            throw NumericsError("monodromy: Wronskian residual " +
                                fmt(res.wronskian_residual) + " after 6 retries at x0=" +
                                fmt(x0));
        tol *= 0.125;
    }

    const double band = 1e-6 * std::max(1.0, std::abs(model.g(x0)) * tau);
    res.verdict = std::abs(res.phidot_tau) <= band ? BundleVerdict::PeriodicBundle
                                                   : BundleVerdict::UnboundedBundle;
    return res;
}

std::vector<std::pair<int, double>> monodromy_growth(const ForceModel& model, double x0,
                                                     int n_max, double ode_tol) {
    if (n_max < 2) throw ValidationError("monodromy_growth: n_max must be >= 2");
    const double tau = period(model, x0).T;
    num::OdeOptions opt;
    opt.rtol = ode_tol;
    opt.atol = ode_tol;

    std::vector<std::pair<int, double>> out;
    State6 y{x0, 0.0, 1.0, 0.0, 0.0, 1.0};
    for (int k = 1; k <= n_max; ++k) {
        y = num::integrate_ode<6>(variational_rhs(model), y, (k - 1) * tau, k * tau, opt);
        out.emplace_back(k, y[3]);
    }
    return out;
}

std::vector<FundamentalState> fundamental_solutions(const ForceModel& model, double x0,
                                                    std::span<const double> times,
                                                    double ode_tol) {
    num::OdeOptions opt;
    opt.rtol = ode_tol;
    opt.atol = ode_tol;

    std::vector<FundamentalState> out;
    out.reserve(times.size());
    State6 y{x0, 0.0, 1.0, 0.0, 0.0, 1.0};
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw ValidationError("fundamental_solutions: times must be sorted");
        if (target > t) {
            y = num::integrate_ode<6>(variational_rhs(model), y, t, target, opt);
            t = target;
        }
        out.push_back({t, y[0], y[1], y[2], y[3], y[4], y[5]});
    }
    return out;
}

StabilityVerdict classify_equilibrium(const ForceModel& model, int n_amplitudes, double x_hi,
                                      double ode_tol) {
    if (n_amplitudes < 1) throw ValidationError("classify_equilibrium: need n_amplitudes >= 1");
    if (x_hi <= 0.0) x_hi = 0.5 * model.center().x_max_pos;

    StabilityVerdict verdict;
    verdict.eigen_imag = std::sqrt(model.ddV0());
    verdict.multiplicity = 2;

    for (int k = 0; k < n_amplitudes; ++k) {
        const double x = x_hi * std::pow(2.0, -k);
        const MonodromyResult m = monodromy(model, x, ode_tol);
        if (m.verdict == BundleVerdict::UnboundedBundle)
            verdict.witness_amplitudes.push_back(x);
        verdict.ladder.push_back(m);
    }

    const bool any_unbounded = !verdict.witness_amplitudes.empty();
    const IsochronyReport rep = isochrony_report(model);
    const bool isochronous = rep.verdict == IsochronyVerdict::Isochronous;

    verdict.classification =
        any_unbounded ? Classification::WeaklyUnstable : Classification::StableIsochronous;
    // conflicting evidence is reported, the bundle-based verdict is kept
    verdict.conflict = (any_unbounded && isochronous) || (!any_unbounded && !isochronous);
    return verdict;
}

double planar_min_distance(const ForceModel& model, double x0) {
    const double v0 = model.V(x0);
    const double h0 = involution(model, x0).h_x;
    // r^2(x) = x^2 + 2 (V(x0) - V(x)) over the orbit's x-range
    auto r2 = [&](double x) { return x * x + 2.0 * (v0 - model.V(x)); };
    double best = r2(x0);
    const int n = 2048;
    for (int i = 0; i <= n; ++i) {
        const double x = h0 + (x0 - h0) * i / n;
        best = std::min(best, r2(x));
    }
    return std::sqrt(std::max(best, 0.0));
}

AsymptoticProbe asymptotic_motion_probe(const ForceModel& model, double x0,
                                        double horizon_periods, double ode_tol) {
    if (!(x0 > 0.0)) throw ValidationError("asymptotic_motion_probe: x0 must be positive");
    const double tau = period(model, x0).T;
    const double horizon = horizon_periods * tau;

    using State4 = std::array<double, 4>;
    auto rhs = [&model](double, const State4& y, State4& dy) {
        dy[0] = y[3];
        dy[1] = y[2];
        dy[2] = -model.dg(y[0]) * y[1];
        dy[3] = -model.g(y[0]);
    };
    auto rhs_neg = [&model](double, const State4& y, State4& dy) {
        dy[0] = -y[3];
        dy[1] = -y[2];
        dy[2] = model.dg(y[0]) * y[1];
        dy[3] = model.g(y[0]);
    };

    const State4 start{x0, 1.0, 0.0, 0.0};
    double min_d2 = x0 * x0 + 1.0;
    auto track = [&min_d2](double, const State4& y) {
        const double d2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
        min_d2 = std::min(min_d2, d2);
    };

    num::OdeOptions opt;
    opt.rtol = ode_tol;
    opt.atol = ode_tol;
    opt.max_step = tau / 64.0;
    num::integrate_ode<4>(rhs, start, 0.0, horizon, opt, track);
    num::integrate_ode<4>(rhs_neg, start, 0.0, horizon, opt, track);

    AsymptoticProbe probe;
    probe.min_distance_4d = std::sqrt(min_d2);
    probe.planar_min_distance = planar_min_distance(model, x0);
    probe.horizon_periods = horizon_periods;
    return probe;
}

} // namespace isodyn
