#include "isodyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "isodyn/hill.hpp"
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

} // namespace

std::pair<double, double> evaluate_integrals(const ForceModel& model, const PhasePoint4& pt) {
    model.require_in_domain(pt.q1, "evaluate_integrals");
    const double H = pt.p1 * pt.p2 + model.g(pt.q1) * pt.q2;
    const double K = 0.5 * pt.p2 * pt.p2 + model.V(pt.q1);
    return {H, K};
}

std::pair<std::array<double, 4>, std::array<double, 4>> vector_fields(const ForceModel& model,
                                                                      const PhasePoint4& pt) {
    model.require_in_domain(pt.q1, "vector_fields");
    const double g = model.g(pt.q1);
    const double dg = model.dg(pt.q1);
    const std::array<double, 4> xh{pt.p2, pt.p1, -dg * pt.q2, -g};
    const std::array<double, 4> xk{0.0, pt.p2, -g, 0.0};
    return {xh, xk};
}

PhasePoint4 flow_K_exact(const ForceModel& model, const PhasePoint4& pt, double t) {
    model.require_in_domain(pt.q1, "flow_K_exact");
    return {pt.q1, pt.q2 + pt.p2 * t, pt.p1 - model.g(pt.q1) * t, pt.p2};
}

bool in_M(const ForceModel& model, const PhasePoint4& pt) {
    if (!model.domain().contains(pt.q1)) return false;
    return 0.5 * pt.p2 * pt.p2 + model.V(pt.q1) < model.center().e_max;
}

bool in_N(const ForceModel& model, const PhasePoint4& pt) {
    return in_M(model, pt) && !(pt.q1 == 0.0 && pt.p2 == 0.0);
}

TrajectoryRecord integrate_H(const ForceModel& model, const PhasePoint4& pt, double t_end,
                             double dt, std::size_t stride) {
    if (!(dt > 0.0)) throw ValidationError("integrate_H: dt must be positive");
    if (!(t_end > 0.0)) throw ValidationError("integrate_H: t_end must be positive");
    if (!in_M(model, pt)) throw ValidationError("integrate_H: initial state outside M");
    if (stride == 0) stride = 1;

    const long steps = std::max(1L, std::lround(t_end / dt));
    const double h = t_end / double(steps);

    TrajectoryRecord rec;
    rec.integrator = "strang(dt=" + fmt(h) + ")";
    const auto [H0, K0] = evaluate_integrals(model, pt);

    PhasePoint4 s = pt;
    rec.times.push_back(0.0);
    rec.states.push_back(s);

    auto kick = [&model, &s](double tau) {
        s.p1 -= model.dg(s.q1) * s.q2 * tau;
        s.p2 -= model.g(s.q1) * tau;
    };
    auto shift = [&s](double tau) {
        s.q1 += s.p2 * tau;
        s.q2 += s.p1 * tau;
    };

    for (long i = 1; i <= steps; ++i) {
        kick(0.5 * h);
        shift(h);
        kick(0.5 * h);

        const double t = h * double(i);
        if (!in_M(model, s))
            throw NumericsError("integrate_H: state left M at t=" + fmt(t) +
                                " (center bound exceeded)");
        const double H = s.p1 * s.p2 + model.g(s.q1) * s.q2;
        const double K = 0.5 * s.p2 * s.p2 + model.V(s.q1);
        rec.H_drift = std::max(rec.H_drift, std::abs(H - H0));
        rec.K_drift = std::max(rec.K_drift, std::abs(K - K0));
        if (i % static_cast<long>(stride) == 0 || i == steps) {
            rec.times.push_back(t);
            rec.states.push_back(s);
        }
    }
    return rec;
}

TrajectoryRecord integrate_reference(const ForceModel& model, const PhasePoint4& pt,
                                     double t_end, double tol, std::size_t stride) {
    if (!in_M(model, pt)) throw ValidationError("integrate_reference: initial state outside M");
    using State4 = std::array<double, 4>;
    auto rhs = [&model](double, const State4& y, State4& dy) {
        dy[0] = y[3];
        dy[1] = y[2];
        dy[2] = -model.dg(y[0]) * y[1];
        dy[3] = -model.g(y[0]);
    };

    TrajectoryRecord rec;
    rec.integrator = "dopri5(tol=" + fmt(tol) + ")";
    const auto [H0, K0] = evaluate_integrals(model, pt);
    rec.times.push_back(0.0);
    rec.states.push_back(pt);

    std::size_t accepted = 0;
    num::OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    const State4 y0{pt.q1, pt.q2, pt.p1, pt.p2};
    const State4 yT = num::integrate_ode<4>(
        rhs, y0, 0.0, t_end, opt, [&](double t, const State4& y) {
            const PhasePoint4 s{y[0], y[1], y[2], y[3]};
            const double H = s.p1 * s.p2 + model.g(s.q1) * s.q2;
            const double K = 0.5 * s.p2 * s.p2 + model.V(s.q1);
            rec.H_drift = std::max(rec.H_drift, std::abs(H - H0));
            rec.K_drift = std::max(rec.K_drift, std::abs(K - K0));
            if (++accepted % stride == 0) {
                rec.times.push_back(t);
                rec.states.push_back(s);
            }
        });
    if (rec.times.back() != t_end) {
        rec.times.push_back(t_end);
        rec.states.push_back({yT[0], yT[1], yT[2], yT[3]});
    }
    return rec;
}

PhasePoint2 integrate_planar(const ForceModel& model, const PhasePoint2& start, double t,
                             double tol) {
    using State2 = std::array<double, 2>;
    auto rhs = [&model](double, const State2& y, State2& dy) {
        dy[0] = y[1];
        dy[1] = -model.g(y[0]);
    };
    num::OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    const State2 end = num::integrate_ode<2>(rhs, {start.x, start.v}, 0.0, t, opt);
    return {end[0], end[1]};
}

Observable observable_H(const ForceModel& model) {
    Observable o;
    o.value = [&model](const PhasePoint4& pt) {
        return pt.p1 * pt.p2 + model.g(pt.q1) * pt.q2;
    };
    o.gradient = [&model](const PhasePoint4& pt) {
        return std::array<double, 4>{model.dg(pt.q1) * pt.q2, model.g(pt.q1), pt.p2, pt.p1};
    };
    return o;
}

Observable observable_K(const ForceModel& model) {
    Observable o;
    o.value = [&model](const PhasePoint4& pt) {
        return 0.5 * pt.p2 * pt.p2 + model.V(pt.q1);
    };
    o.gradient = [&model](const PhasePoint4& pt) {
        return std::array<double, 4>{model.g(pt.q1), 0.0, 0.0, pt.p2};
    };
    return o;
}

namespace {

std::array<double, 4> fd_gradient(const std::function<double(const PhasePoint4&)>& f,
                                  const PhasePoint4& pt) {
    const std::array<double, 4> x{pt.q1, pt.q2, pt.p1, pt.p2};
    std::array<double, 4> grad{};
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        std::array<double, 4> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = f({xp[0], xp[1], xp[2], xp[3]});
        const double fm = f({xm[0], xm[1], xm[2], xm[3]});
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericsError("poisson_bracket: non-finite field value near the point");
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

} // namespace

double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint4& pt) {
    const std::array<double, 4> gf = f.gradient ? f.gradient(pt) : fd_gradient(f.value, pt);
    const std::array<double, 4> gg = g.gradient ? g.gradient(pt) : fd_gradient(g.value, pt);
    // {f, g} = df/dq . dg/dp - dg/dq . df/dp, gradient order (q1, q2, p1, p2)
    return gf[0] * gg[2] + gf[1] * gg[3] - gg[0] * gf[2] - gg[1] * gf[3];
}

std::array<double, 2> gradient_pair_singular_values(const ForceModel& model,
                                                    const PhasePoint4& pt) {
    const auto gh = observable_H(model).gradient(pt);
    const auto gk = observable_K(model).gradient(pt);
    double a = 0.0, b = 0.0, c = 0.0; // Gram matrix [[a, b], [b, c]]
    for (int i = 0; i < 4; ++i) {
        a += gh[i] * gh[i];
        b += gh[i] * gk[i];
        c += gk[i] * gk[i];
    }
    const double tr = a + c;
    const double disc = std::sqrt(std::max((a - c) * (a - c) + 4.0 * b * b, 0.0));
    const double l1 = 0.5 * (tr + disc), l2 = 0.5 * (tr - disc);
    return {std::sqrt(std::max(l1, 0.0)), std::sqrt(std::max(l2, 0.0))};
}

LevelSetDiagnostics level_set_diagnostics(const ForceModel& model, const PhasePoint4& pt) {
    if (!in_N(model, pt))
        throw ValidationError("level_set_diagnostics: point not in N "
                              "(planar projection at the origin or outside the center)");
    LevelSetDiagnostics d;
    const auto [H, K] = evaluate_integrals(model, pt);
    d.H_value = H;
    d.K_value = K;
    d.x0 = u_inverse(model, std::sqrt(2.0 * K));
    d.omega = 2.0 * std::numbers::pi / period(model, d.x0).T;
    d.drift_indicator = monodromy(model, d.x0).phidot_tau;
    d.independence_min_sv = gradient_pair_singular_values(model, pt)[1];
    return d;
}

std::vector<PhasePoint4> sample_points_in_N(const ForceModel& model, int n,
                                            std::uint64_t seed, double box_halfwidth,
                                            double energy_margin) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const Interval& J = model.domain();
    const double delta = 1e-6 * J.diam();
    const double e_cap = energy_margin * model.center().e_max;
    const double p2_max = std::sqrt(2.0 * e_cap);

    std::vector<PhasePoint4> pts;
    pts.reserve(n);
    while (static_cast<int>(pts.size()) < n) {
        PhasePoint4 pt;
        pt.q1 = J.lo + delta + (J.diam() - 2 * delta) * unit(rng);
        pt.q2 = box_halfwidth * (2.0 * unit(rng) - 1.0);
        pt.p1 = box_halfwidth * (2.0 * unit(rng) - 1.0);
        pt.p2 = p2_max * (2.0 * unit(rng) - 1.0);
        if (!(0.5 * pt.p2 * pt.p2 + model.V(pt.q1) < e_cap)) continue;
        if (pt.q1 == 0.0 && pt.p2 == 0.0) continue;
        pts.push_back(pt);
    }
    return pts;
}

} // namespace isodyn
