#ifndef ISODYN_PERIOD_HPP
#define ISODYN_PERIOD_HPP

#include <optional>
#include <string>
#include <vector>

#include "isodyn/force_model.hpp"

namespace isodyn {

struct PeriodSample {
    double x0 = 0.0;
    double y0 = 0.0;
    double T = 0.0;
    std::optional<double> T_prime;
    double quadrature_error_estimate = 0.0;
};

struct PeriodScan {
    std::vector<PeriodSample> samples;          // strictly increasing in x0
    std::vector<double> critical_amplitudes;    // sign changes of T'
    std::string model_ref;
};

/// Period of the planar orbit through (x0, 0) by smooth quadrature over the
/// arcsin-substituted half-integral; the integrand uses (u^{-1})'(r) = r/g(x).
PeriodSample period(const ForceModel& model, double x0, double quad_abs_tol = 1e-10);

/// Same period by direct quadrature between the turning points h(x0) and x0,
/// with the sine substitution absorbing the endpoint singularities. Kept as an
/// independent route for cross-checks.
double period_raw(const ForceModel& model, double x0, double quad_abs_tol = 1e-10);

/// dT/dx0 by Richardson-extrapolated central differences of `period`.
double period_derivative(const ForceModel& model, double x0, double quad_abs_tol = 1e-10);

/// Geometric amplitude scan toward 0 with T' and critical amplitudes located
/// by bisection to 1e-6 relative.
PeriodScan period_scan(const ForceModel& model, double x_lo, double x_hi, int n,
                       double quad_abs_tol = 1e-10);

} // namespace isodyn

#endif
