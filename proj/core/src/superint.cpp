#include "isodyn/superint.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

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

std::string to_string(SuperFamily f) {
    switch (f) {
        case SuperFamily::Sqrt: return "sqrt";
        case SuperFamily::Quartic: return "quartic";
        case SuperFamily::Generic: return "generic";
    }
    return "?";
}

std::array<double, 3> ansatz_coefficients(const AnsatzParams& p, double q1, double q2) {
    const double A = p.a * q1 * q1 + p.b1 * q1 + p.c1;
    const double B = -2.0 * p.a * q1 * q2 - p.b1 * q2 - p.b2 * q1 + p.c3;
    const double C = p.a * q2 * q2 + p.b2 * q2 + p.c2;
    return {A, B, C};
}

PdeResiduals pde_residuals(const ForceModel& model, const AnsatzParams& p, double q1,
                           double q2) {
    if (!model.has_d2g())
        throw ValidationError("pde_residuals: model has no second derivative of g");

    PdeResiduals out;
    const double h1 = 1e-6 * std::max(1.0, std::abs(q1));
    const double h2 = 1e-6 * std::max(1.0, std::abs(q2));
    auto A = [&](double x, double y) { return ansatz_coefficients(p, x, y)[0]; };
    auto B = [&](double x, double y) { return ansatz_coefficients(p, x, y)[1]; };
    auto C = [&](double x, double y) { return ansatz_coefficients(p, x, y)[2]; };

    const double d2A = (A(q1, q2 + h2) - A(q1, q2 - h2)) / (2 * h2);
    const double d1C = (C(q1 + h1, q2) - C(q1 - h1, q2)) / (2 * h1);
    const double d1A = (A(q1 + h1, q2) - A(q1 - h1, q2)) / (2 * h1);
    const double d2B = (B(q1, q2 + h2) - B(q1, q2 - h2)) / (2 * h2);
    const double d1B = (B(q1 + h1, q2) - B(q1 - h1, q2)) / (2 * h1);
    const double d2C = (C(q1, q2 + h2) - C(q1, q2 - h2)) / (2 * h2);
    out.coefficient_residuals = {d2A, d1C, d1A + d2B, d1B + d2C};

    out.potential_compat = 3.0 * (p.b2 + 2.0 * p.a * q2) * model.g(q1) -
                           3.0 * (p.b1 + 2.0 * p.a * q1) * q2 * model.dg(q1) -
                           2.0 * (p.c1 + q1 * (p.b1 + p.a * q1)) * q2 * model.d2g(q1);
    return out;
}

FamilyForce family_force(SuperFamily family, const SuperParams& params) {
    if (!(params.omega > 0.0)) throw ValidationError("family_force: omega must be positive");
    switch (family) {
        case SuperFamily::Sqrt:
            if (params.lambda == 0.0)
                throw ValidationError("family_force(sqrt): lambda must be nonzero");
            return {make_sqrt_isochrone(params.omega, params.lambda), false};
        case SuperFamily::Quartic:
            if (params.lambda == 0.0)
                throw ValidationError("family_force(quartic): lambda must be nonzero");
            return {make_quartic_isochrone(params.omega, params.lambda), false};
        case SuperFamily::Generic:
            if (params.c1 == 0.0)
                throw ValidationError("family_force(generic): c1 = 0 admits no solutions");
            if (params.b1 == 0.0)
                return {make_harmonic(params.omega), true};
            if (params.b1 * params.b1 == 4.0 * params.c1)
                throw ValidationError(
                    "family_force(generic): b1^2 = 4 c1 is the quartic family");
            return {make_generic_superintegrable(params.omega, params.b1, params.c1), false};
    }
    throw ValidationError("family_force: unknown family");
}

double ThirdIntegral::operator()(const PhasePoint4& pt) const {
    const double q1 = pt.q1, q2 = pt.q2, p1 = pt.p1, p2 = pt.p2;
    const double w2 = omega * omega;

    switch (family) {
        case SuperFamily::Sqrt: {
            const double q = 1.0 + 2.0 * lambda * q1;
            if (!(q > 0.0))
                throw ValidationError("third integral (sqrt): point outside family domain");
            const double sq = std::sqrt(q);
            const double g = w2 / lambda * (1.0 - 1.0 / sq);
            const double rad = 2.0 * lambda * q1 / (1.0 + sq); // = sqrt(q) - 1, stable
            return c1 * p1 * p1 * q + p1 * p2 * (c3 - 2.0 * lambda * c1 * q2) +
                   c2 * p2 * p2 + c2 * w2 / (lambda * lambda) * rad * rad +
                   c1 * w2 * q2 * q2 + q2 * (c3 - 2.0 * lambda * c1 * q2) * g + d;
        }
        case SuperFamily::Quartic: {
            const double w = lambda + q1;
            if (!(w * lambda > 0.0))
                throw ValidationError("third integral (quartic): point outside family domain");
            const double l2 = lambda * lambda;
            return p1 * p1 * w * w - 2.0 * p1 * p2 * w * q2 + p2 * p2 * (1.0 + q2 * q2) +
                   0.25 * w2 *
                       (w * w + l2 * l2 * (1.0 + 4.0 * q2 * q2) / (w * w)) -
                   0.5 * l2 * w2;
        }
        case SuperFamily::Generic: {
            const double rad = 1.0 + q1 * (b1 + q1) / c1g;
            if (!(rad > 0.0))
                throw ValidationError("third integral (generic): point outside family domain");
            const double D = b1 * b1 - 4.0 * c1g;
            const double D2 = D * D;
            const double b14 = b1 * b1 * b1 * b1;
            const double t_kin =
                p1 * p1 + p2 * p2 +
                (p1 * q1 - p2 * q2) * (p1 * (b1 + q1) - p2 * q2) / c1g;
            const double t_poly =
                w2 / D2 *
                (8.0 * b1 * b1 * c1g * c1g +
                 4.0 * c1g * (b1 * b1 + 4.0 * c1g) * (b1 + q1) * q1 +
                 (16.0 * c1g * c1g - b14) * q2 * q2);
            const double t_rad =
                2.0 * b1 * w2 / D2 * (b1 + 2.0 * q1) *
                (-4.0 * c1g * (c1g + (b1 + q1) * q1) + D * q2 * q2) / std::sqrt(rad);
            return t_kin + t_poly + t_rad;
        }
    }
    throw ValidationError("third integral: unknown family");
}

ThirdIntegral make_sqrt_integral(double omega, double lambda, double c1, double c2,
                                 double c3, double d) {
    if (!(omega > 0.0) || lambda == 0.0)
        throw ValidationError("make_sqrt_integral: need omega > 0, lambda != 0");
    ThirdIntegral w;
    w.family = SuperFamily::Sqrt;
    w.omega = omega;
    w.lambda = lambda;
    w.c1 = c1;
    w.c2 = c2;
    w.c3 = c3;
    w.d = d;
    w.label = "sqrt(omega=" + fmt(omega) + ",lambda=" + fmt(lambda) + ",c1=" + fmt(c1) +
              ",c2=" + fmt(c2) + ",c3=" + fmt(c3) + ",d=" + fmt(d) + ")";
    return w;
}

ThirdIntegral make_sqrt_integral_normalized(double omega, double lambda) {
    return make_sqrt_integral(omega, lambda, 1.0, 1.0, 0.0, 0.0);
}

ThirdIntegral make_quartic_integral(double omega, double lambda) {
    if (!(omega > 0.0) || lambda == 0.0)
        throw ValidationError("make_quartic_integral: need omega > 0, lambda != 0");
    ThirdIntegral w;
    w.family = SuperFamily::Quartic;
    w.omega = omega;
    w.lambda = lambda;
    w.label = "quartic(omega=" + fmt(omega) + ",lambda=" + fmt(lambda) + ")";
    return w;
}

ThirdIntegral make_generic_integral(double omega, double b1, double c1) {
    if (!(omega > 0.0) || b1 == 0.0 || c1 == 0.0 || b1 * b1 == 4.0 * c1)
        throw ValidationError("make_generic_integral: need omega > 0, b1 != 0, c1 != 0, "
                              "b1^2 != 4 c1");
    ThirdIntegral w;
    w.family = SuperFamily::Generic;
    w.omega = omega;
    w.b1 = b1;
    w.c1g = c1;
    w.label = "generic(omega=" + fmt(omega) + ",b1=" + fmt(b1) + ",c1=" + fmt(c1) + ")";
    return w;
}

namespace {

double second_diff(const ThirdIntegral& w, const PhasePoint4& e_i, const PhasePoint4& e_j,
                   double h) {
    auto shift = [](const PhasePoint4& a, const PhasePoint4& b, double s) {
        return PhasePoint4{a.q1 + s * b.q1, a.q2 + s * b.q2, a.p1 + s * b.p1,
                           a.p2 + s * b.p2};
    };
    const PhasePoint4 origin{};
    const bool diag = &e_i == &e_j;
    if (diag) {
        const double w0 = w(origin);
        return (w(shift(origin, e_i, h)) - 2.0 * w0 + w(shift(origin, e_i, -h))) / (h * h);
    }
    const PhasePoint4 pp = shift(shift(origin, e_i, h), e_j, h);
    const PhasePoint4 pm = shift(shift(origin, e_i, h), e_j, -h);
    const PhasePoint4 mp = shift(shift(origin, e_i, -h), e_j, h);
    const PhasePoint4 mm = shift(shift(origin, e_i, -h), e_j, -h);
    return (w(pp) - w(pm) - w(mp) + w(mm)) / (4.0 * h * h);
}

} // namespace

std::array<std::array<double, 4>, 4> hessian_at_origin(const ThirdIntegral& w, double step) {
    const std::array<PhasePoint4, 4> basis{PhasePoint4{1, 0, 0, 0}, PhasePoint4{0, 1, 0, 0},
                                           PhasePoint4{0, 0, 1, 0}, PhasePoint4{0, 0, 0, 1}};
    std::array<std::array<double, 4>, 4> hess{};
    for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) {
            const PhasePoint4& ei = basis[i];
            const PhasePoint4& ej = (i == j) ? basis[i] : basis[j];
            const double dh = second_diff(w, ei, ej, step);
            const double dh2 = second_diff(w, ei, ej, 0.5 * step);
            const double r = (4.0 * dh2 - dh) / 3.0;
            hess[i][j] = r;
            hess[j][i] = r;
        }
    }
    return hess;
}

std::array<double, 4> gradient_at_origin(const ThirdIntegral& w, double step) {
    std::array<double, 4> grad{};
    const std::array<PhasePoint4, 4> basis{PhasePoint4{1, 0, 0, 0}, PhasePoint4{0, 1, 0, 0},
                                           PhasePoint4{0, 0, 1, 0}, PhasePoint4{0, 0, 0, 1}};
    for (int i = 0; i < 4; ++i) {
        auto at = [&](double s) {
            return w(PhasePoint4{s * basis[i].q1, s * basis[i].q2, s * basis[i].p1,
                                 s * basis[i].p2});
        };
        grad[i] = (at(step) - at(-step)) / (2.0 * step);
    }
    return grad;
}

AuditResult conservation_audit(const ForceModel& model, const ThirdIntegral& w,
                               const PhasePoint4& pt, int periods, bool use_reference,
                               double dt_fraction, std::size_t trace_rows) {
    if (periods < 1) throw ValidationError("conservation_audit: periods must be >= 1");
    if (!in_M(model, pt)) throw ValidationError("conservation_audit: point outside M");

    const auto [H, K] = evaluate_integrals(model, pt);
    (void)H;
    const double x0 = u_inverse(model, std::sqrt(2.0 * std::max(K, 0.0)));
    const double tau = period(model, x0).T;
    const double t_end = periods * tau;

    AuditResult audit;
    audit.w0 = w(pt);

    TrajectoryRecord rec;
    if (use_reference) {
        rec = integrate_reference(model, pt, t_end, 1e-12, 4);
    } else {
        const double dt = dt_fraction * tau;
        const std::size_t steps = static_cast<std::size_t>(std::lround(t_end / dt));
        rec = integrate_H(model, pt, t_end, dt, std::max<std::size_t>(1, steps / 4000));
    }

    const std::size_t stride = std::max<std::size_t>(1, rec.states.size() / trace_rows);
    for (std::size_t i = 0; i < rec.states.size(); ++i) {
        const double wi = w(rec.states[i]);
        audit.max_drift = std::max(audit.max_drift, std::abs(wi - audit.w0));
        if (i % stride == 0 || i + 1 == rec.states.size())
            audit.trace.push_back({rec.times[i], wi, wi - audit.w0});
    }
    return audit;
}

} // namespace isodyn
