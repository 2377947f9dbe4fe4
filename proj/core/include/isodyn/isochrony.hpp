#ifndef ISODYN_ISOCHRONY_HPP
#define ISODYN_ISOCHRONY_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isodyn/force_model.hpp"

namespace isodyn {

/// One evaluation of the involution h: the conjugate position with
/// V(h(x)) = V(x) on the opposite side of the well.
struct InvolutionProbe {
    double x = 0.0;
    double h_x = 0.0;
    double residual_V = 0.0;
    Interval bracket{};
};

enum class IsochronyVerdict { Isochronous, NotIsochronous, Inconclusive };

std::string to_string(IsochronyVerdict v);

struct IsochronyReport {
    double residual_sup = 0.0;                  // sup |V - V''(0)/8 (x-h)^2| on the grid
    std::optional<double> nc4_residual;         // V4(0) - 5 V3(0)^2 / (3 V2(0))
    std::optional<double> nc6_residual;         // V6(0) - 7 V3 V5 / V2 + 140 V3^4 / (9 V2^3)
    IsochronyVerdict verdict = IsochronyVerdict::Inconclusive;
    double residual_tol = 0.0;
    double nc4_tol = 0.0;
    double nc6_tol = 0.0;
};

struct HTaylorFit {
    double a = 0.0;                 // quadratic coefficient of h
    double b = 0.0;                 // quartic coefficient of h
    double odd_residual_cubic = 0.0;    // fitted cubic coefficient minus (-a^2)
    double odd_residual_quintic = 0.0;  // fitted quintic coefficient minus (2a^4 - 3ab)
    double fit_residual = 0.0;
};

/// u(x) = sgn(x) sqrt(2 V(x)), the conjugating diffeomorphism.
double u_map(const ForceModel& model, double x);

/// Image interval u(J) (approached at the open ends).
Interval u_image(const ForceModel& model);

/// Inverse of u by bracketed root finding on the monotone u.
double u_inverse(const ForceModel& model, double y);

/// The involution h(x) = u^{-1}(-u(x)).
InvolutionProbe involution(const ForceModel& model, double x);

/// Decide isochronicity: the sup-residual of the square-well identity plus
/// the two necessary conditions on the Taylor stack.
IsochronyReport isochrony_report(const ForceModel& model, int grid_n = 64);

/// Least-squares fit of h(x) = -x + a x^2 + c3 x^3 + b x^4 + c5 x^5 (+ higher
/// nuisance terms) reporting how far c3, c5 fall from the involution
/// constraints -a^2 and 2a^4 - 3ab.
HTaylorFit h_taylor_fit(std::span<const InvolutionProbe> probes);

/// Probes on symmetric Chebyshev nodes suitable for h_taylor_fit.
std::vector<InvolutionProbe> involution_probes_for_fit(const ForceModel& model, int n = 128,
                                                       double span_fraction = 0.45);

// --- constructions ----------------------------------------------------------

struct InvolutionPayload {
    std::function<double(double)> h;
    std::function<double(double)> dh; // optional analytic derivative
};

/// Model with V(x) = omega^2/8 (x - h(x))^2 from a user-supplied involution.
ForceModel design_from_involution(const InvolutionPayload& payload, double omega,
                                  Interval domain, std::string name = "");

/// Isochronous model from an even C^1 function: the pi/4 clockwise rotation
/// of its graph is tabulated as y = h(x) and fed to design_from_involution.
ForceModel design_from_even(const std::function<double(double)>& f, Interval t_range,
                            double omega, std::string name = "");

struct PeriodDesign {
    std::vector<double> u_inverse_coeffs; // odd coefficients of u^{-1}: y, y^3, y^5, ...
    ForceModel model;
};

/// Model whose period function is T(y) = 2 pi / omega * sum t_k y^{2k}
/// (t_0 = 1) on u-amplitudes up to y_range, via the closed inversion
/// of the half-integral with the monomial rule.
PeriodDesign design_from_period(std::span<const double> t_coeffs, double omega,
                                double y_range, std::string name = "");

/// (2k)!! / (2k+1)!!, the monomial half-integral ratio.
double abel_monomial_coefficient(int k);

} // namespace isodyn

#endif
