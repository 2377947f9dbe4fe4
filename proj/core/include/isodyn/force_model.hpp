#ifndef ISODYN_FORCE_MODEL_HPP
#define ISODYN_FORCE_MODEL_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isodyn/common.hpp"

namespace isodyn {

/// Planar state (x, xdot), the (q1, p2) projection of the 4D flow.
struct PhasePoint2 {
    double x = 0.0;
    double v = 0.0;
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Energy ceiling of the planar center and the amplitude limits reaching it.
struct CenterBound {
    double e_max = 0.0;
    double x_max_pos = 0.0;
    double x_max_neg = 0.0;
};

/// A restoring force g on an open interval J around 0 with g(0) = 0,
/// g'(0) > 0, its potential V (V(0) = 0, single well on J), the derivative
/// stack, and the induced center bound. Immutable after construction;
/// all evaluations are pure.
class ForceModel {
public:
    using Fn = std::function<double(double)>;

    struct Parts {
        std::string name;
        Interval domain;
        Fn g;
        Fn dg;
        Fn d2g; // may be empty
        Fn V;
        std::optional<std::array<double, 7>> taylor_V0; // V(0), V'(0), ..., V^(6)(0)
        DerivativeMode mode = DerivativeMode::Analytic;
    };

    explicit ForceModel(Parts parts);

    double g(double x) const { return g_(x); }
    double dg(double x) const { return dg_(x); }
    bool has_d2g() const { return static_cast<bool>(d2g_); }
    double d2g(double x) const;
    double V(double x) const { return V_(x); }

    const std::string& name() const { return name_; }
    const Interval& domain() const { return domain_; }
    DerivativeMode derivative_mode() const { return mode_; }
    const std::optional<std::array<double, 7>>& taylor_V0() const { return taylor_; }
    const CenterBound& center() const { return bound_; }

    /// Second derivative of V at the origin, from the Taylor stack when
    /// available, else dg(0).
    double ddV0() const;

    void require_in_domain(double x, const char* who) const;

private:
    void validate();
    void compute_center_bound();

    std::string name_;
    Interval domain_;
    Fn g_, dg_, d2g_, V_;
    std::optional<std::array<double, 7>> taylor_;
    DerivativeMode mode_;
    CenterBound bound_;
};

/// The center bound of a validated model.
CenterBound center_bound(const ForceModel& model);

// --- catalog ----------------------------------------------------------------

ForceModel make_harmonic(double omega = 1.0, std::optional<Interval> domain = {});
ForceModel make_pendulum(std::optional<Interval> domain = {});
ForceModel make_cubic(double alpha, double beta, double gamma,
                      std::optional<Interval> domain = {});
ForceModel make_sqrt_isochrone(double omega, double lambda,
                               std::optional<Interval> domain = {});
ForceModel make_quartic_isochrone(double omega, double lambda,
                                  std::optional<Interval> domain = {});
ForceModel make_generic_superintegrable(double omega, double b1, double c1,
                                        std::optional<Interval> domain = {});

/// The built-in models with their default parameters and domains.
std::vector<ForceModel> builtin_catalog();

/// Model defined by an expression in x (see Expression for the grammar).
/// Derivatives and the Taylor stack come from Richardson-extrapolated central
/// differences; V from adaptive quadrature of g cached on a dense grid.
ForceModel model_from_expression(std::string_view source, Interval domain,
                                 std::string name = "");

} // namespace isodyn

#endif
