#ifndef ISODYN_NUMERICS_HPP
#define ISODYN_NUMERICS_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "isodyn/common.hpp"

namespace isodyn::num {

using Fn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// root finding

/// Solve f(x) = 0 on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
/// Secant steps confined to the bracket, bisection fallback. Iterates until
/// the bracket collapses to `xtol` plus a few ulps, so with xtol = 0 the
/// result is accurate to rounding in f.
double solve_bracketed(const Fn& f, double lo, double hi, double f_lo, double f_hi,
                       double xtol = 0.0);
double solve_bracketed(const Fn& f, double lo, double hi, double xtol = 0.0);

// ---------------------------------------------------------------------------
// quadrature

struct Quadrature {
    double value = 0.0;
    double error_estimate = 0.0;
    int panels = 0;
};

/// Nested Gauss-Legendre pair (61-point value, 30-point error reference) with
/// up to `max_bisections` levels of panel splitting. Throws NumericsError when
/// the accumulated estimate stays two orders of magnitude above `abs_tol`.
Quadrature integrate(const Fn& f, double a, double b, double abs_tol = 1e-10,
                     int max_bisections = 2);

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n);

// ---------------------------------------------------------------------------
// finite differences

/// Central finite difference of order `order` (1..6) with a 3-node Richardson
/// table. `scale` sets the base step, `reach` limits how far from x the
/// stencil may evaluate (the widest node sits at 12*h for orders 5-6).
double derivative(const Fn& f, double x, int order, double scale = 1.0,
                  double reach = 1e300);

/// Same, with an explicit base step (no automatic choice).
double derivative_with_step(const Fn& f, double x, int order, double h);

// ---------------------------------------------------------------------------
// ODE integration: Dormand-Prince 5(4)

struct OdeOptions {
    double rtol = 1e-11;
    double atol = 1e-11;
    double max_step = 1e300;
    double initial_step = 0.0; // 0 = automatic
};

/// Right-hand side: dy = f(t, y). Observer (optional) is called after every
/// accepted step. Integrates exactly to t1 (last step clamped); t1 < t0 is
/// allowed. Throws NumericsError when the step size underflows.
template <std::size_t N>
using OdeRhs = std::function<void(double, const std::array<double, N>&, std::array<double, N>&)>;

template <std::size_t N>
using OdeObserver = std::function<void(double, const std::array<double, N>&)>;

template <std::size_t N>
std::array<double, N> integrate_ode(const OdeRhs<N>& rhs, std::array<double, N> y,
                                    double t0, double t1, const OdeOptions& opt = {},
                                    const OdeObserver<N>& observer = {});

// ---------------------------------------------------------------------------
// least squares / polynomial fitting

/// Minimises |A x - b| with dense Householder QR. A is row-major m x n, m >= n.
/// Throws ValidationError when A is numerically rank deficient.
std::vector<double> qr_lstsq(const std::vector<double>& a, std::size_t m, std::size_t n,
                             const std::vector<double>& b);

/// Least-squares polynomial fit in the Chebyshev basis on [-half, half] up to
/// `degree`, returned as monomial coefficients c[0..degree] about 0.
struct ChebFit {
    std::vector<double> monomial; // c[k] multiplies x^k
    double max_residual = 0.0;
};
ChebFit chebyshev_fit(std::span<const double> xs, std::span<const double> ys,
                      double half_width, int degree);

/// Leading monomial coefficients of f about 0 extracted from a degree-22
/// Chebyshev fit on 128 symmetric nodes within [-half, half]. More robust
/// than high-order differences when f has a singularity just outside the
/// sampled window.
std::vector<double> chebyshev_taylor(const Fn& f, double half_width, int n_coeffs);

/// Evaluate a monomial-coefficient polynomial (c[0] + c[1] x + ...).
double polyval(std::span<const double> c, double x);

// ---------------------------------------------------------------------------
// piecewise-cubic Hermite interpolation

class CubicHermite {
public:
    CubicHermite() = default;

    /// Nodes must be strictly increasing; one slope per node. When `monotone`
    /// is set the slopes are limited Fritsch-Carlson style so the interpolant
    /// preserves the monotonicity of the data.
    CubicHermite(std::vector<double> xs, std::vector<double> ys, std::vector<double> ds,
                 bool monotone = false);

    double operator()(double x) const;
    double deriv(double x) const;
    double second(double x) const;

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::size_t locate(double x) const;
    std::vector<double> x_, y_, d_;
};

// ---------------------------------------------------------------------------
// misc

double kahan_sum(std::span<const double> xs);

} // namespace isodyn::num

#endif
