#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "cuspflow/profiles.hpp"

namespace cuspflow {
namespace solver {

/// Evolving log conformal factor on a radial grid.
struct FlowState {
  RadialGrid grid;
  Eigen::ArrayXd v;
  double t = 0.0;
  /// Lower barrier asserted on the inner half of the grid each step
  /// (set for capped-cusp data, where u >= e^2 persists under the flow).
  std::optional<double> v_floor;
};

// Dirichlet rules for the outermost node.
struct ScaledCusp {};         // v = (1/2) log((1+2t) h(r_out))
struct ScaledPoincare {};     // v = (1/2) log((1+2t) h~(r_out))
struct ExactCigar {
  double r0;
};
struct ShrinkingSphere {
  double beta;
  double k;  // valid for t < 1/(2K)
};
struct Frozen {
  double v_out;  // v(r_out, 0), held fixed
};
using BoundaryRule = std::variant<ScaledCusp, ScaledPoincare, ExactCigar, ShrinkingSphere, Frozen>;

/// Boundary value at time t.
double boundary_value(const BoundaryRule& bc, const RadialGrid& grid, double t);

struct SolverConfig {
  double dt_init = 1e-8;
  double dt_min = 1e-14;
  double dt_max = 1e-2;       // absolute ceiling
  double dt_max_frac = 1e-3;  // additional ceiling dt <= dt_max_frac * t (0 disables)
  double newton_tol = 1e-10;  // max-norm residual on v
  int newton_max_iters = 25;
  double grow = 2.0;    // dt growth factor after easy steps
  double shrink = 0.5;  // dt reduction factor on Newton failure

  void validate() const;
};

/// Sample the profile on the grid at t = 0. Rejects data that is singular
/// or out of log-range (|v| > 1e3) at any node.
FlowState init_state(const RadialProfile& profile, const RadialGrid& grid);

struct StepResult {
  FlowState state;
  double dt_used;
  double dt_next;  // suggested attempt for the next step
  int newton_iters;
  int retries;
};

/// One backward-Euler step of dv/dt = e^{-2v} (v'' + v'/r), solved by
/// Newton iteration on the tridiagonal system; halves dt and retries on
/// failure, grows it after quick convergence.
StepResult step(const FlowState& state, const BoundaryRule& bc, const SolverConfig& cfg,
                double dt_attempt);
StepResult step(const FlowState& state, const BoundaryRule& bc, const SolverConfig& cfg);

struct RunStats {
  long steps = 0;
  long newton_iters = 0;
  long retries = 0;
  double dt_smallest = std::numeric_limits<double>::infinity();
  double dt_largest = 0.0;
};

struct Trajectory {
  std::vector<FlowState> samples;  // one per requested sample time, in order
  RunStats stats;
};

/// Advance from the initial state with adaptive dt, landing exactly on
/// each sample time. sample_times must be sorted, strictly positive and
/// bounded by t_end.
Trajectory run(const FlowState& initial, const BoundaryRule& bc, const SolverConfig& cfg,
               double t_end, const std::vector<double>& sample_times);
Trajectory run(const RadialProfile& profile, const RadialGrid& grid, const BoundaryRule& bc,
               const SolverConfig& cfg, double t_end, const std::vector<double>& sample_times);

/// Exact solution value for the two validation boundary rules.
double exact_solution_v(const BoundaryRule& bc, double r, double t);

struct ConvergenceResult {
  double order;                     // fitted slope of log error vs log N
  std::vector<double> max_errors;   // per grid size
  std::vector<int> grid_sizes;
};

/// Observed spatial order against the exact solution of an ExactCigar or
/// ShrinkingSphere run at t_probe, refining uniform grids and scaling the
/// time step like 1/N^2 so the time error stays subordinate.
ConvergenceResult convergence_study(const RadialProfile& profile, const BoundaryRule& bc,
                                    const SolverConfig& cfg, double t_probe,
                                    const std::vector<int>& grid_sizes, double r_out = 0.9);

/// Sampled-profile view of a state (shares no storage).
RadialProfile to_profile(const FlowState& state);

}  // namespace solver
}  // namespace cuspflow
