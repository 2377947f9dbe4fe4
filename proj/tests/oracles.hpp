// Test-only oracles, independent of the library implementation paths they
// check.
#ifndef ISODYN_TESTS_ORACLES_HPP
#define ISODYN_TESTS_ORACLES_HPP

#include <cmath>
#include <numbers>

namespace oracles {

/// Complete elliptic integral K(k) by the arithmetic-geometric mean.
inline double agm_K(double k) {
    double a = 1.0, b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-17 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return std::numbers::pi / (2.0 * a);
}

/// Pendulum period through amplitude x0: T = 4 K(sin(x0/2)).
inline double pendulum_period(double x0) { return 4.0 * agm_K(std::sin(0.5 * x0)); }

/// dT/dx0 of the pendulum oracle by central differences.
inline double pendulum_period_derivative(double x0) {
    const double h = 1e-5;
    return (pendulum_period(x0 + h) - pendulum_period(x0 - h)) / (2.0 * h);
}

} // namespace oracles

#endif
