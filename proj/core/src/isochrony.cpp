#include "isodyn/isochrony.hpp"
#include <memory>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "isodyn/numerics.hpp"
#include "isodyn/series.hpp"

namespace isodyn {

namespace {

constexpr double kEndMargin = 1e-9;

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double sgn(double x) { return x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0; }

} // namespace

std::string to_string(IsochronyVerdict v) {
    switch (v) {
        case IsochronyVerdict::Isochronous: return "Isochronous";
        case IsochronyVerdict::NotIsochronous: return "NotIsochronous";
        case IsochronyVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

double u_map(const ForceModel& model, double x) {
    model.require_in_domain(x, "u_map");
    return sgn(x) * std::sqrt(2.0 * model.V(x));
}

Interval u_image(const ForceModel& model) {
    const Interval& J = model.domain();
    const double delta = kEndMargin * J.diam();
    return {-std::sqrt(2.0 * model.V(J.lo + delta)), std::sqrt(2.0 * model.V(J.hi - delta))};
}

double u_inverse(const ForceModel& model, double y) {
    if (y == 0.0) return 0.0;
    const Interval& J = model.domain();
    const double delta = kEndMargin * J.diam();
    const Interval I = u_image(model);
    if (!(y > I.lo && y < I.hi))
        throw ValidationError("u_inverse: y=" + fmt(y) + " outside image interval (" +
                              fmt(I.lo) + ", " + fmt(I.hi) + ")");
    const double lo = y > 0 ? 0.0 : J.lo + delta;
    const double hi = y > 0 ? J.hi - delta : 0.0;
    return num::solve_bracketed(
        [&](double x) { return u_map(model, x) - y; }, lo, hi);
}

InvolutionProbe involution(const ForceModel& model, double x) {
    model.require_in_domain(x, "involution");
    InvolutionProbe probe;
    probe.x = x;
    if (x == 0.0) return probe;

    // near the origin the square-well flatness starves the root of digits;
    // fall back to the local expansion h = -x + a x^2
    const Interval& J = model.domain();
    if (std::abs(x) < 1e-6 * J.diam()) {
        double a = 0.0;
        if (const auto& t = model.taylor_V0(); t && (*t)[2] > 0.0 && std::isfinite((*t)[3]))
            a = -(*t)[3] / (3.0 * (*t)[2]);
        probe.h_x = -x + a * x * x;
        probe.bracket = {probe.h_x, probe.h_x};
        probe.residual_V = std::abs(model.V(probe.h_x) - model.V(x));
        return probe;
    }

    const double ux = u_map(model, x);
    const Interval I = u_image(model);
    if (x > 0 && !(-ux > I.lo))
        throw ValidationError("involution: conjugate of x=" + fmt(x) +
                              " escapes J (left side too short)");
    if (x < 0 && !(-ux < I.hi))
        throw ValidationError("involution: conjugate of x=" + fmt(x) +
                              " escapes J (right side too short)");

    const double delta = kEndMargin * J.diam();
    const double lo = x > 0 ? J.lo + delta : 0.0;
    const double hi = x > 0 ? 0.0 : J.hi - delta;
    probe.bracket = {lo, hi};
    probe.h_x = num::solve_bracketed(
        [&](double t) { return u_map(model, t) + ux; }, lo, hi);
    probe.residual_V = std::abs(model.V(probe.h_x) - model.V(x));
    return probe;
}

IsochronyReport isochrony_report(const ForceModel& model, int grid_n) {
    if (grid_n < 16) throw ValidationError("isochrony_report: grid_n must be >= 16");
    IsochronyReport rep;

    const double ddV0 = model.ddV0();
    const Interval& J = model.domain();
    rep.residual_tol = 1e-7 * ddV0 * J.diam() * J.diam();

    const double x_lim = 0.98 * model.center().x_max_pos;
    for (int i = 1; i <= grid_n; ++i) {
        const double x = x_lim * i / grid_n;
        const InvolutionProbe p = involution(model, x);
        const double d = x - p.h_x;
        const double resid = std::abs(model.V(x) - ddV0 / 8.0 * d * d);
        rep.residual_sup = std::max(rep.residual_sup, resid);
    }

    const double nc_rel =
        model.derivative_mode() == DerivativeMode::Analytic ? 1e-9 : 1e-5;
    bool nc_ok = false;
    if (const auto& t = model.taylor_V0()) {
        const double v2 = (*t)[2], v3 = (*t)[3], v4 = (*t)[4], v5 = (*t)[5], v6 = (*t)[6];
        if (v2 > 0 && std::isfinite(v3) && std::isfinite(v4) && std::isfinite(v5) &&
            std::isfinite(v6)) {
            const double nc4_ref = 5.0 * v3 * v3 / (3.0 * v2);
            const double nc6_ref1 = 7.0 * v3 * v5 / v2;
            const double nc6_ref2 = 140.0 * v3 * v3 * v3 * v3 / (9.0 * v2 * v2 * v2);
            rep.nc4_residual = v4 - nc4_ref;
            rep.nc6_residual = v6 - nc6_ref1 + nc6_ref2;
            rep.nc4_tol = nc_rel * std::max({v2, std::abs(v4), std::abs(nc4_ref)});
            rep.nc6_tol = nc_rel * std::max({v2, std::abs(v6), std::abs(nc6_ref1),
                                             std::abs(nc6_ref2)});
            nc_ok = true;
        }
    }

    const bool resid_pass = rep.residual_sup <= rep.residual_tol;
    if (nc_ok) {
        const bool nc_pass = std::abs(*rep.nc4_residual) <= rep.nc4_tol &&
                             std::abs(*rep.nc6_residual) <= rep.nc6_tol;
        if (!nc_pass)
            rep.verdict = IsochronyVerdict::NotIsochronous;
        else
            rep.verdict = resid_pass ? IsochronyVerdict::Isochronous
                                     : IsochronyVerdict::NotIsochronous;
    } else {
        rep.verdict = resid_pass ? IsochronyVerdict::Inconclusive
                                 : IsochronyVerdict::NotIsochronous;
    }
    return rep;
}

HTaylorFit h_taylor_fit(std::span<const InvolutionProbe> probes) {
    if (probes.size() < 8)
        throw ValidationError("h_taylor_fit: at least 8 probes required");

    double x_max = 0.0, x_min_nz = 1e300;
    for (const auto& p : probes) {
        x_max = std::max(x_max, std::abs(p.x));
        if (p.x != 0.0) x_min_nz = std::min(x_min_nz, std::abs(p.x));
    }
    if (!(x_max > 0.0) || x_max / x_min_nz > 1e10)
        throw ValidationError("h_taylor_fit: probe span is ill-conditioned");

    std::vector<double> xs, rs;
    xs.reserve(probes.size());
    rs.reserve(probes.size());
    for (const auto& p : probes) {
        xs.push_back(p.x);
        rs.push_back(p.h_x + p.x); // remove the leading -x
    }

    const int degree = std::min<int>(22, static_cast<int>(probes.size()) - 2);
    if (degree < 5) throw ValidationError("h_taylor_fit: not enough probes for the fit");
    const num::ChebFit fit = num::chebyshev_fit(xs, rs, x_max, degree);

    HTaylorFit out;
    out.a = fit.monomial[2];
    out.b = fit.monomial[4];
    out.odd_residual_cubic = fit.monomial[3] + out.a * out.a;
    out.odd_residual_quintic =
        fit.monomial[5] - (2.0 * std::pow(out.a, 4) - 3.0 * out.a * out.b);
    out.fit_residual = fit.max_residual;
    return out;
}

std::vector<InvolutionProbe> involution_probes_for_fit(const ForceModel& model, int n,
                                                       double span_fraction) {
    const CenterBound& cb = model.center();
    const double half =
        span_fraction * std::min(cb.x_max_pos, std::abs(cb.x_max_neg));
    std::vector<InvolutionProbe> probes;
    probes.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double xi = std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
        const double x = half * xi;
        if (std::abs(x) < 1e-8 * half) continue;
        probes.push_back(involution(model, x));
    }
    return probes;
}

// ---------------------------------------------------------------------------
// constructions

namespace {

/// Assemble a designed model from h and its derivative stack.
/// V(x) = omega^2 / 8 (x - h(x))^2 so g and dg follow from h', h''.
ForceModel make_designed_model(const std::function<double(double)>& h,
                               const std::function<double(double)>& dh,
                               const std::function<double(double)>& d2h,
                               const num::Series7& h_series, double omega, Interval J,
                               std::string name, DerivativeMode mode) {
    const double w2 = omega * omega;
    auto V = [h, w2](double x) {
        const double d = x - h(x);
        return 0.125 * w2 * d * d;
    };
    auto g = [h, dh, w2](double x) {
        return 0.25 * w2 * (x - h(x)) * (1.0 - dh(x));
    };
    auto dg = [h, dh, d2h, w2](double x) {
        const double phi = x - h(x), dphi = 1.0 - dh(x);
        return 0.25 * w2 * (dphi * dphi - phi * d2h(x));
    };

    num::Series7 phi_series = num::Series7::variable() - h_series;
    const num::Series7 v_series = (phi_series * phi_series).scaled(0.125 * w2);
    std::array<double, 7> taylor{};
    for (int k = 2; k <= 6; ++k) taylor[k] = v_series.derivative_at_zero(k);

    ForceModel::Parts p;
    p.name = std::move(name);
    p.domain = J;
    p.g = g;
    p.dg = dg;
    p.V = V;
    p.taylor_V0 = taylor;
    p.mode = mode;
    return ForceModel(std::move(p));
}

} // namespace

ForceModel design_from_involution(const InvolutionPayload& payload, double omega,
                                  Interval domain, std::string name) {
    if (!(omega > 0.0)) throw ValidationError("design_from_involution: omega must be > 0");
    if (!payload.h) throw ValidationError("design_from_involution: missing h");
    if (!(domain.lo < 0.0 && 0.0 < domain.hi))
        throw ValidationError("design_from_involution: domain must contain 0");

    const auto& h = payload.h;
    const double diam = domain.diam();
    if (std::abs(h(0.0)) > 1e-10 * diam)
        throw ValidationError("design_from_involution: h(0) = " + fmt(h(0.0)) + " != 0");

    auto reach_at = [domain](double x) {
        return 0.9 * std::min(x - domain.lo, domain.hi - x);
    };
    // step scale proportional to the edge distance: payload involutions are
    // typically steep toward one end of J
    auto scale_at = [domain, diam](double x) {
        const double dist = std::min(x - domain.lo, domain.hi - x);
        return std::max(1e-6 * diam, std::min(std::max(0.25, std::abs(x)), dist));
    };
    std::function<double(double)> dh = payload.dh;
    if (!dh)
        dh = [h, scale_at, reach_at](double x) {
            return num::derivative(h, x, 1, scale_at(x), reach_at(x));
        };
    auto d2h = [h, scale_at, reach_at](double x) {
        return num::derivative(h, x, 2, scale_at(x), reach_at(x));
    };

    const double dh0 = dh(0.0);
    if (std::abs(dh0 + 1.0) > 1e-8)
        throw ValidationError("design_from_involution: h'(0) = " + fmt(dh0) + " != -1");

    // involution invariants on a probe grid
    const double delta = kEndMargin * diam;
    double max_dev = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double x = domain.lo + delta + (diam - 2 * delta) * i / 64.0;
        const double hx = h(x);
        if (std::abs(x) > 1e-9 * diam && !(sgn(hx) == -sgn(x)))
            throw ValidationError("design_from_involution: sign flip fails at x=" + fmt(x));
        const double hh = h(hx);
        if (!std::isfinite(hh))
            throw ValidationError("design_from_involution: h not evaluable at h(" + fmt(x) +
                                  ") = " + fmt(hx));
        max_dev = std::max(max_dev, std::abs(hh - x));
    }
    if (max_dev > 1e-8 * std::max(1.0, diam))
        throw ValidationError("design_from_involution: h o h != id, max deviation " +
                              fmt(max_dev));

    // Taylor stack of h at 0 from a Chebyshev window fit; direct high-order
    // differences lose too many digits when h is steep toward one end of J
    const double x_f = 0.45 * std::min(-domain.lo, domain.hi);
    const std::vector<double> mono = num::chebyshev_taylor(h, x_f, 6);
    num::Series7 h_series;
    for (int k = 1; k <= 5; ++k) h_series.c[k] = mono[k];

    if (name.empty()) name = "designed_involution(omega=" + fmt(omega) + ")";
    return make_designed_model(h, dh, d2h, h_series, omega, domain, std::move(name),
                               DerivativeMode::FiniteDifference);
}

ForceModel design_from_even(const std::function<double(double)>& f, Interval t_range,
                            double omega, std::string name) {
    if (!f) throw ValidationError("design_from_even: missing f");
    const double t_half = std::min(-t_range.lo, t_range.hi);
    if (!(t_half > 0.0))
        throw ValidationError("design_from_even: t range must straddle 0");
    if (std::abs(f(0.0)) > 1e-10)
        throw ValidationError("design_from_even: f(0) = " + fmt(f(0.0)) + " != 0");
    for (int i = 1; i <= 16; ++i) {
        const double t = t_half * i / 16.0;
        if (std::abs(f(t) - f(-t)) > 1e-8 * std::max(1.0, std::abs(f(t))))
            throw ValidationError("design_from_even: f is not even at t=" + fmt(t));
    }

    const int n = 512;
    const double sq2 = std::numbers::sqrt2;
    const double t_lim = t_half * (1.0 - 1e-6);
    std::vector<double> xs(n + 1), ys(n + 1), ds(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = -t_lim + 2.0 * t_lim * i / n;
        const double ft = f(t);
        xs[i] = (t + ft) / sq2;
        ys[i] = (ft - t) / sq2;
        const double fp = num::derivative(f, t, 1, std::max(0.25, std::abs(t)),
                                          0.9 * (t_half - std::abs(t)));
        if (!(fp > -1.0))
            throw ValidationError(
                "design_from_even: rotated graph condition fails at t=" + fmt(t) +
                " (first coordinate not increasing; shrink the interval)");
        ds[i] = (fp - 1.0) / (fp + 1.0);
    }
    for (int i = 1; i <= n; ++i)
        if (!(xs[i] > xs[i - 1]))
            throw ValidationError("design_from_even: rotated graph condition fails "
                                  "(first coordinate not increasing; shrink the interval)");

    auto table = std::make_shared<num::CubicHermite>(xs, ys, ds, true);
    auto h = [table](double x) { return (*table)(x); };
    auto dh = [table](double x) { return table->deriv(x); };
    auto d2h = [table](double x) { return table->second(x); };

    // parametric Taylor stack: h = Y o X^{-1} with X = (t+f)/sqrt2, Y = (f-t)/sqrt2
    num::Series7 f_series;
    const double reach0 = 0.9 * t_half;
    double fact = 1.0;
    for (int k = 1; k <= 5; ++k) {
        fact *= k;
        f_series.c[k] = num::derivative(f, 0.0, k, 0.25, reach0) / fact;
    }
    const num::Series7 t_series = num::Series7::variable();
    const num::Series7 x_series = (t_series + f_series).scaled(1.0 / sq2);
    const num::Series7 y_series = (f_series - t_series).scaled(1.0 / sq2);
    const num::Series7 h_series = y_series.compose(x_series.inverse_function());

    const double pad = 1e-9 * (xs.back() - xs.front());
    const Interval J{xs.front() + pad, xs.back() - pad};
    if (name.empty()) name = "designed_even(omega=" + fmt(omega) + ")";
    return make_designed_model(h, dh, d2h, h_series, omega, J, std::move(name),
                               DerivativeMode::FiniteDifference);
}

double abel_monomial_coefficient(int k) {
    double num = 1.0, den = 1.0;
    for (int i = 1; i <= k; ++i) {
        num *= 2.0 * i;
        den *= 2.0 * i + 1.0;
    }
    return num / den;
}

PeriodDesign design_from_period(std::span<const double> t_coeffs, double omega,
                                double y_range, std::string name) {
    if (t_coeffs.empty() || std::abs(t_coeffs[0] - 1.0) > 1e-12)
        throw ValidationError("design_from_period: t0 must be 1");
    if (!(omega > 0.0) || !(y_range > 0.0))
        throw ValidationError("design_from_period: omega and y_range must be positive");

    // T(y) > 0 on [0, y_range]
    for (int i = 0; i <= 64; ++i) {
        const double y = y_range * i / 64.0;
        double T = 0.0, yp = 1.0;
        for (double tk : t_coeffs) {
            T += tk * yp;
            yp *= y * y;
        }
        if (!(T > 0.0))
            throw ValidationError("design_from_period: prescribed T(y) <= 0 at y=" + fmt(y));
    }

    // u^{-1}(y) = 1/omega sum t_k (2k)!!/(2k+1)!! y^{2k+1}
    std::vector<double> a(t_coeffs.size());
    for (std::size_t k = 0; k < t_coeffs.size(); ++k)
        a[k] = t_coeffs[k] * abel_monomial_coefficient(static_cast<int>(k)) / omega;

    // full odd polynomial P = u^{-1} and its derivatives
    std::vector<double> P(2 * a.size(), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) P[2 * k + 1] = a[k];
    std::vector<double> dP(P.size() - 1), d2P(P.size() >= 2 ? P.size() - 2 : 0),
        d3P(P.size() >= 3 ? P.size() - 3 : 0);
    for (std::size_t i = 1; i < P.size(); ++i) dP[i - 1] = i * P[i];
    for (std::size_t i = 1; i < dP.size(); ++i) d2P[i - 1] = i * dP[i];
    for (std::size_t i = 1; i < d2P.size(); ++i) d3P[i - 1] = i * d2P[i];

    for (int i = 0; i <= 256; ++i) {
        const double y = y_range * i / 256.0;
        if (!(num::polyval(dP, y) > 0.0))
            throw ValidationError("design_from_period: u^{-1} not strictly increasing on "
                                  "[0, y_range] (period function infeasible at this range)");
    }

    const double x_range = num::polyval(P, y_range);
    const Interval J{-x_range, x_range};

    auto u_of = [P, dP, y_range](double x) {
        if (x == 0.0) return 0.0;
        const double ymax = y_range * (1.0 + 1e-12);
        const double lo = x > 0 ? 0.0 : -ymax, hi = x > 0 ? ymax : 0.0;
        return num::solve_bracketed(
            [&](double y) { return num::polyval(P, y) - x; }, lo, hi);
    };

    auto V = [u_of](double x) {
        const double u = u_of(x);
        return 0.5 * u * u;
    };
    auto g = [u_of, dP](double x) {
        const double u = u_of(x);
        return u / num::polyval(dP, u);
    };
    auto dg = [u_of, dP, d2P](double x) {
        const double u = u_of(x);
        const double up = 1.0 / num::polyval(dP, u);
        const double upp = -num::polyval(d2P, u) * up * up * up;
        return up * up + u * upp;
    };
    auto d2g = [u_of, dP, d2P, d3P](double x) {
        const double u = u_of(x);
        const double up = 1.0 / num::polyval(dP, u);
        const double upp = -num::polyval(d2P, u) * up * up * up;
        const double uppp = -num::polyval(d3P, u) * up * up * up * up -
                            3.0 * num::polyval(d2P, u) * up * up * upp;
        return 3.0 * up * upp + u * uppp;
    };

    num::Series7 p_series;
    for (std::size_t i = 0; i < P.size() && i < 7; ++i) p_series.c[i] = P[i];
    const num::Series7 u_series = p_series.inverse_function();
    const num::Series7 v_series = (u_series * u_series).scaled(0.5);
    std::array<double, 7> taylor{};
    for (int k = 2; k <= 6; ++k) taylor[k] = v_series.derivative_at_zero(k);

    ForceModel::Parts parts;
    parts.name = name.empty() ? "designed_period(omega=" + fmt(omega) + ")" : std::move(name);
    parts.domain = J;
    parts.g = g;
    parts.dg = dg;
    parts.d2g = d2g;
    parts.V = V;
    parts.taylor_V0 = taylor;
    parts.mode = DerivativeMode::Analytic;

    PeriodDesign out{std::move(a), ForceModel(std::move(parts))};
    return out;
}

} // namespace isodyn
