#ifndef ISODYN_HILL_HPP
#define ISODYN_HILL_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isodyn/force_model.hpp"

namespace isodyn {

enum class BundleVerdict { PeriodicBundle, UnboundedBundle };

std::string to_string(BundleVerdict v);

/// Endpoint data of the fundamental solutions phi, psi of the variational
/// equation along the periodic orbit through (x0, 0), integrated over one
/// period tau. phi(0)=1, phi'(0)=0, psi(0)=0, psi'(0)=1.
struct MonodromyResult {
    double x0 = 0.0;
    double tau = 0.0;
    double phi_tau = 0.0;
    double phidot_tau = 0.0;
    double psi_tau = 0.0;
    double psidot_tau = 0.0;
    double wronskian_residual = 0.0; // max |psi' phi - phi' psi - 1|
    BundleVerdict verdict = BundleVerdict::PeriodicBundle;
};

enum class Classification { StableIsochronous, WeaklyUnstable };

std::string to_string(Classification c);

struct StabilityVerdict {
    Classification classification = Classification::StableIsochronous;
    std::vector<double> witness_amplitudes;   // rungs with an unbounded bundle
    double eigen_imag = 0.0;                  // eigenvalues are +- i * eigen_imag
    int multiplicity = 2;
    bool conflict = false;                    // bundle data disagreed with the
                                              // isochrony verdict (diagnostic)
    std::vector<MonodromyResult> ladder;
};

/// State of (X, Xdot, phi, phidot, psi, psidot) at a sample time.
struct FundamentalState {
    double t = 0.0;
    double X = 0.0, Xdot = 0.0;
    double phi = 0.0, phidot = 0.0;
    double psi = 0.0, psidot = 0.0;
};

/// Periodic planar solution X(t, x0) with X(0)=x0, Xdot(0)=0.
PhasePoint2 reference_orbit(const ForceModel& model, double x0, double t);

MonodromyResult monodromy(const ForceModel& model, double x0, double ode_tol = 1e-11);

/// phidot at the multiples n*tau for n = 1..n_max (single continuous
/// integration, clamped at each multiple).
std::vector<std::pair<int, double>> monodromy_growth(const ForceModel& model, double x0,
                                                     int n_max, double ode_tol = 1e-11);

/// Fundamental solutions sampled at the given (sorted, nonnegative) times.
std::vector<FundamentalState> fundamental_solutions(const ForceModel& model, double x0,
                                                    std::span<const double> times,
                                                    double ode_tol = 1e-11);

/// Monodromy on a geometric amplitude ladder x_hi * 2^-k combined with the
/// isochrony verdict.
StabilityVerdict classify_equilibrium(const ForceModel& model, int n_amplitudes = 8,
                                      double x_hi = 0.0, double ode_tol = 1e-11);

struct AsymptoticProbe {
    double min_distance_4d = 0.0;
    double planar_min_distance = 0.0;
    double horizon_periods = 0.0;
};

/// Minimum 4D distance to the origin along the trajectory from (x0, 1, 0, 0)
/// over [-horizon, +horizon] periods (backward leg via the negated field).
AsymptoticProbe asymptotic_motion_probe(const ForceModel& model, double x0,
                                        double horizon_periods, double ode_tol = 1e-11);

/// Minimum of sqrt(x^2 + xdot^2) over the planar orbit through (x0, 0).
double planar_min_distance(const ForceModel& model, double x0);

} // namespace isodyn

#endif
