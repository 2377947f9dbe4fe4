#ifndef ISODYN_DYNAMICS_HPP
#define ISODYN_DYNAMICS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "isodyn/force_model.hpp"

namespace isodyn {

struct PhasePoint4 {
    double q1 = 0.0, q2 = 0.0, p1 = 0.0, p2 = 0.0;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<PhasePoint4> states;
    double H_drift = 0.0; // max |H - H(0)| along the run
    double K_drift = 0.0;
    std::string integrator;
};

struct LevelSetDiagnostics {
    double H_value = 0.0;
    double K_value = 0.0;
    double x0 = 0.0;               // positive amplitude with V(x0) = K
    double omega = 0.0;            // 2 pi / T(x0)
    double drift_indicator = 0.0;  // phidot(tau) proxy for the transverse drift
    double independence_min_sv = 0.0;
};

/// Scalar field on phase space with an optional analytic gradient
/// (order q1, q2, p1, p2). Without a gradient, brackets fall back to
/// central differences.
struct Observable {
    std::function<double(const PhasePoint4&)> value;
    std::function<std::array<double, 4>(const PhasePoint4&)> gradient;
};

/// H = p1 p2 + g(q1) q2 and K = p2^2/2 + V(q1).
std::pair<double, double> evaluate_integrals(const ForceModel& model, const PhasePoint4& pt);

/// The Hamiltonian vector fields of H and of K at pt.
std::pair<std::array<double, 4>, std::array<double, 4>> vector_fields(const ForceModel& model,
                                                                      const PhasePoint4& pt);

/// Exact flow of K: (q1, q2 + p2 t, p1 - g(q1) t, p2).
PhasePoint4 flow_K_exact(const ForceModel& model, const PhasePoint4& pt, double t);

bool in_M(const ForceModel& model, const PhasePoint4& pt);
bool in_N(const ForceModel& model, const PhasePoint4& pt);

/// Strang splitting with the exact subflows of p1 p2 (shift) and g(q1) q2
/// (kick), composition kick(dt/2) shift(dt) kick(dt/2). States are recorded
/// every `stride` steps; H/K drift is tracked at every step. Throws when the
/// state leaves M.
TrajectoryRecord integrate_H(const ForceModel& model, const PhasePoint4& pt, double t_end,
                             double dt, std::size_t stride = 1);

/// Adaptive 5(4) reference integration of the same flow (oracle channel).
TrajectoryRecord integrate_reference(const ForceModel& model, const PhasePoint4& pt,
                                     double t_end, double tol = 1e-12,
                                     std::size_t stride = 1);

/// Planar flow xddot = -g(x) from (x, v) over time t.
PhasePoint2 integrate_planar(const ForceModel& model, const PhasePoint2& start, double t,
                             double tol = 1e-12);

Observable observable_H(const ForceModel& model);
Observable observable_K(const ForceModel& model);

/// Poisson bracket {f, g} at pt; analytic gradients are used when both
/// observables carry them, otherwise central differences with step
/// 1e-6 * max(1, |coordinate|).
double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint4& pt);

/// Singular values (max, min) of the stacked gradients of H and K.
std::array<double, 2> gradient_pair_singular_values(const ForceModel& model,
                                                    const PhasePoint4& pt);

/// Level-set data through pt (requires pt in N): amplitude, frequency,
/// transverse drift indicator, independence margin.
LevelSetDiagnostics level_set_diagnostics(const ForceModel& model, const PhasePoint4& pt);

/// Deterministic uniform samples of N: q1, p2 inside the center region
/// (energy below margin * e_max), q2 and p1 in a centered box.
std::vector<PhasePoint4> sample_points_in_N(const ForceModel& model, int n,
                                            std::uint64_t seed, double box_halfwidth = 2.0,
                                            double energy_margin = 0.95);

} // namespace isodyn

#endif
