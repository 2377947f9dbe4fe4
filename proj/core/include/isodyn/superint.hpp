#ifndef ISODYN_SUPERINT_HPP
#define ISODYN_SUPERINT_HPP

#include <array>
#include <string>
#include <vector>

#include "isodyn/dynamics.hpp"
#include "isodyn/force_model.hpp"

namespace isodyn {

/// Coefficient parameters of the quadratic-in-momenta ansatz
/// W = A p1^2 + B p1 p2 + C p2^2 + U.
struct AnsatzParams {
    double a = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double d = 0.0;
};

/// A(q1) = a q1^2 + b1 q1 + c1, B = -2a q1 q2 - b1 q2 - b2 q1 + c3,
/// C(q2) = a q2^2 + b2 q2 + c2.
std::array<double, 3> ansatz_coefficients(const AnsatzParams& p, double q1, double q2);

struct PdeResiduals {
    std::array<double, 4> coefficient_residuals{}; // d2A, d1C, d1A + d2B, d1B + d2C
    double potential_compat = 0.0;                 // integrability condition for U
};

/// Residuals of the coefficient conditions (finite differences of the closed
/// forms, regression guard) and of the potential-compatibility identity
/// 3(b2 + 2a q2) g - 3(b1 + 2a q1) q2 g' - 2(c1 + q1(b1 + a q1)) q2 g''.
PdeResiduals pde_residuals(const ForceModel& model, const AnsatzParams& p, double q1,
                           double q2);

enum class SuperFamily { Sqrt, Quartic, Generic };

std::string to_string(SuperFamily f);

struct SuperParams {
    double omega = 1.0;
    double lambda = 0.0; // sqrt / quartic families
    double b1 = 0.0;     // generic family
    double c1 = 0.0;
};

struct FamilyForce {
    ForceModel model;
    bool trivial_harmonic = false; // generic family with b1 = 0
};

/// Force model of a superintegrable family. Generic with b1 = 0 degenerates
/// to the harmonic force and is returned flagged as trivial; c1 = 0 and
/// b1^2 = 4 c1 are rejected.
FamilyForce family_force(SuperFamily family, const SuperParams& params);

/// Closed-form third first integral of one family.
class ThirdIntegral {
public:
    double operator()(const PhasePoint4& pt) const;

    SuperFamily family = SuperFamily::Sqrt;
    double omega = 1.0;
    double lambda = 0.0;         // sqrt / quartic
    double b1 = 0.0, c1g = 0.0;  // generic
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, d = 0.0; // free constants (sqrt form)
    std::string label;
};

/// Sqrt-family integral with free constants (c1, c2, c3, d).
ThirdIntegral make_sqrt_integral(double omega, double lambda, double c1, double c2,
                                 double c3, double d);
/// The positive-definite normalization c1 = c2 = 1, c3 = d = 0.
ThirdIntegral make_sqrt_integral_normalized(double omega, double lambda);
/// Quartic-family integral (includes the constant shift so W(0) = 0).
ThirdIntegral make_quartic_integral(double omega, double lambda);
/// Generic-family integral, normalized by c1 and vanishing at the origin.
ThirdIntegral make_generic_integral(double omega, double b1, double c1);

/// 4x4 Hessian at the origin by Richardson-refined central second differences.
std::array<std::array<double, 4>, 4> hessian_at_origin(const ThirdIntegral& w,
                                                       double step = 1e-4);
std::array<double, 4> gradient_at_origin(const ThirdIntegral& w, double step = 1e-5);

struct AuditResult {
    double w0 = 0.0;
    double max_drift = 0.0;
    std::vector<std::array<double, 3>> trace; // rows (t, W, W - W0)
};

/// Max |W - W(pt)| along the H-flow over the given number of planar periods.
/// `use_reference` selects the adaptive 5(4) channel; otherwise the splitting
/// integrator with dt = dt_fraction * tau.
AuditResult conservation_audit(const ForceModel& model, const ThirdIntegral& w,
                               const PhasePoint4& pt, int periods,
                               bool use_reference = true, double dt_fraction = 1e-3,
                               std::size_t trace_rows = 200);

} // namespace isodyn

#endif
