#include "cuspflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cuspflow/barriers.hpp"

namespace cuspflow {
namespace solver {

namespace {

// Thomas algorithm; lower[0] and upper[n-1] are ignored.
Eigen::ArrayXd solve_tridiagonal(const Eigen::ArrayXd& lower, const Eigen::ArrayXd& diag,
                                 const Eigen::ArrayXd& upper, Eigen::ArrayXd rhs) {
  const Eigen::Index n = diag.size();
  Eigen::ArrayXd c(n);
  c[0] = upper[0] / diag[0];
  rhs[0] /= diag[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * c[i - 1];
    c[i] = upper[i] / m;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

double log_h(double r) {
  const double l = -std::log(r);
  return -2.0 * (std::log(r) + std::log(l));
}

double log_h_tilde(double r) { return 2.0 * (std::log(2.0) - std::log1p(-r * r)); }

}  // namespace

double boundary_value(const BoundaryRule& bc, const RadialGrid& grid, double t) {
  const double r = grid.r_out();
  return std::visit(
      [&](const auto& rule) -> double {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, ScaledCusp>) {
          return 0.5 * (std::log1p(2.0 * t) + log_h(r));
        } else if constexpr (std::is_same_v<T, ScaledPoincare>) {
          return 0.5 * (std::log1p(2.0 * t) + log_h_tilde(r));
        } else if constexpr (std::is_same_v<T, ExactCigar>) {
          return barriers::cigar_flow(rule.r0, r, t);
        } else if constexpr (std::is_same_v<T, ShrinkingSphere>) {
          if (!(t < 0.5 / rule.k))
            throw std::domain_error("ShrinkingSphere boundary: needs t < 1/(2K)");
          const double v0 = eval_v(RadialProfile::sphere(rule.beta, rule.k), r);
          return v0 + 0.5 * std::log1p(-2.0 * rule.k * t);
        } else {
          return rule.v_out;
        }
      },
      bc);
}

void SolverConfig::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
    throw std::invalid_argument("SolverConfig: need 0 < dt_min <= dt_init <= dt_max");
  if (!(newton_tol > 0.0 && newton_tol <= 1e-4))
    throw std::invalid_argument("SolverConfig: newton_tol must lie in (0, 1e-4]");
  if (newton_max_iters < 1) throw std::invalid_argument("SolverConfig: newton_max_iters >= 1");
  if (!(grow >= 1.0 && shrink > 0.0 && shrink < 1.0))
    throw std::invalid_argument("SolverConfig: bad step safety factors");
}

FlowState init_state(const RadialProfile& profile, const RadialGrid& grid) {
  FlowState state;
  state.grid = grid;
  state.v = Eigen::ArrayXd(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double vi;
    try {
      vi = eval_v(profile, grid.node(i));
    } catch (const std::domain_error&) {
      throw std::domain_error("init_state: profile singular at grid node");
    }
    if (!std::isfinite(vi) || std::abs(vi) > 1e3)
      throw std::domain_error("init_state: |v| > 1e3 at a grid node; data out of log range");
    state.v[i] = vi;
  }
  state.t = 0.0;
  if (profile.get_if<CappedCusp>() != nullptr && grid.r_out() <= 1.0 - 1e-3)
    state.v_floor = 1.0;  // u >= e^2 on the cap family
  return state;
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  int iters = 0;
};

NewtonOutcome backward_euler_newton(const RadialLaplacian& lap, const Eigen::ArrayXd& v_old,
                                    double dt, double v_boundary, const SolverConfig& cfg,
                                    Eigen::ArrayXd& v_new) {
  const Eigen::Index n_unknown = lap.diag.size();
  v_new[n_unknown] = v_boundary;

  NewtonOutcome out;
  Eigen::ArrayXd resid(n_unknown), jac_lower(n_unknown), jac_diag(n_unknown),
      jac_upper(n_unknown);
  for (int iter = 0; iter < cfg.newton_max_iters; ++iter) {
    const Eigen::ArrayXd lap_v = lap.apply(v_new);
    const Eigen::ArrayXd coeff = (-2.0 * v_new.head(n_unknown)).exp();
    resid = v_new.head(n_unknown) - v_old.head(n_unknown) - dt * coeff * lap_v;
    out.residual = resid.abs().maxCoeff();
    out.iters = iter;
    if (!std::isfinite(out.residual)) return out;
    // Per-node tolerance: the stencil is evaluated with cancellation of
    // magnitude ~ eps * sum|L_ij v_j| (huge where the mesh is finest), so
    // the residual cannot be driven below that rounding floor.
    constexpr double eps_mach = 2.22e-16;
    const Eigen::ArrayXd floor = 16.0 * eps_mach * dt * coeff * lap.apply_abs(v_new);
    if ((resid.abs() - floor).maxCoeff() <= cfg.newton_tol) {
      out.converged = true;
      return out;
    }
    jac_diag = 1.0 + dt * coeff * (2.0 * lap_v - lap.diag);
    jac_lower = -dt * coeff * lap.lower;
    jac_upper = -dt * coeff * lap.upper;
    const Eigen::ArrayXd delta = solve_tridiagonal(jac_lower, jac_diag, jac_upper, -resid);
    if (!delta.isFinite().all()) return out;
    v_new.head(n_unknown) += delta;
  }
  return out;
}

}  // namespace

StepResult step(const FlowState& state, const BoundaryRule& bc, const SolverConfig& cfg,
                double dt_attempt) {
  cfg.validate();
  const RadialLaplacian lap = radial_laplacian(state.grid);
  const Eigen::Index n = state.grid.size();

  // Never raise dt above the caller's attempt: landing exactly on a sample
  // time may require a step smaller than dt_min, which is always safe.
  double dt = std::min(dt_attempt, cfg.dt_max);
  if (cfg.dt_max_frac > 0.0 && state.t > 0.0)
    dt = std::min(dt, std::max(cfg.dt_init, cfg.dt_max_frac * state.t));
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");

  StepResult result;
  result.retries = 0;
  Eigen::ArrayXd v_new(n);
  while (true) {
    v_new = state.v;
    const double v_boundary = boundary_value(bc, state.grid, state.t + dt);
    const NewtonOutcome newton =
        backward_euler_newton(lap, state.v, dt, v_boundary, cfg, v_new);
    if (newton.converged) {
      if (!v_new.isFinite().all())
        throw StepFailure("step: non-finite state after Newton solve", state.t, newton.residual);
      result.state.grid = state.grid;
      result.state.v = std::move(v_new);
      result.state.t = state.t + dt;
      result.state.v_floor = state.v_floor;
      result.dt_used = dt;
      result.newton_iters = newton.iters + 1;
      result.dt_next = (newton.iters + 1 <= 5) ? std::min(dt * cfg.grow, cfg.dt_max) : dt;
      if (state.v_floor) {
        const Eigen::Index half = state.grid.last_node_within(0.5 * state.grid.r_out());
        for (Eigen::Index i = 0; i <= half; ++i) {
          if (result.state.v[i] < *state.v_floor - 1e-6)
            throw StepFailure("step: lower-barrier invariant violated", result.state.t,
                              *state.v_floor - result.state.v[i]);
        }
      }
      return result;
    }
    if (dt <= cfg.dt_min * (1.0 + 1e-12))
      throw StepFailure("step: Newton failed at dt_min; residual " +
                            std::to_string(newton.residual),
                        state.t, newton.residual);
    dt = std::max(dt * cfg.shrink, cfg.dt_min);
    ++result.retries;
  }
}

StepResult step(const FlowState& state, const BoundaryRule& bc, const SolverConfig& cfg) {
  return step(state, bc, cfg, cfg.dt_init);
}

Trajectory run(const FlowState& initial, const BoundaryRule& bc, const SolverConfig& cfg,
               double t_end, const std::vector<double>& sample_times) {
  cfg.validate();
  if (sample_times.empty()) throw std::invalid_argument("run: no sample times");
  for (size_t i = 0; i < sample_times.size(); ++i) {
    if (!(sample_times[i] > 0.0 && sample_times[i] <= t_end))
      throw std::invalid_argument("run: sample times must lie in (0, t_end]");
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw std::invalid_argument("run: sample times must be strictly increasing");
  }

  Trajectory traj;
  traj.samples.reserve(sample_times.size());
  FlowState state = initial;
  double dt_next = cfg.dt_init;

  for (double t_target : sample_times) {
    while (state.t < t_target * (1.0 - 1e-14)) {
      const double dt_to_target = t_target - state.t;
      const bool landing = dt_to_target < dt_next;
      const double attempt = std::min(dt_next, dt_to_target);
      StepResult res = step(state, bc, cfg, attempt);
      if (!(res.state.t >= state.t)) throw std::logic_error("run: time went backwards");
      traj.stats.steps += 1;
      traj.stats.newton_iters += res.newton_iters;
      traj.stats.retries += res.retries;
      traj.stats.dt_smallest = std::min(traj.stats.dt_smallest, res.dt_used);
      traj.stats.dt_largest = std::max(traj.stats.dt_largest, res.dt_used);
      state = std::move(res.state);
      // A landing step is artificially short; keep the previous suggestion
      // unless the solver actually had to retreat.
      if (!landing || res.retries > 0) dt_next = res.dt_next;
    }
    state.t = t_target;  // absorb sub-ulp landing error
    traj.samples.push_back(state);
  }
  return traj;
}

Trajectory run(const RadialProfile& profile, const RadialGrid& grid, const BoundaryRule& bc,
               const SolverConfig& cfg, double t_end, const std::vector<double>& sample_times) {
  return run(init_state(profile, grid), bc, cfg, t_end, sample_times);
}

double exact_solution_v(const BoundaryRule& bc, double r, double t) {
  return std::visit(
      [&](const auto& rule) -> double {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, ExactCigar>) {
          return barriers::cigar_flow(rule.r0, r, t);
        } else if constexpr (std::is_same_v<T, ShrinkingSphere>) {
          return eval_v(RadialProfile::sphere(rule.beta, rule.k), r) +
                 0.5 * std::log1p(-2.0 * rule.k * t);
        } else if constexpr (std::is_same_v<T, ScaledPoincare>) {
          return 0.5 * (std::log1p(2.0 * t) + log_h_tilde(r));
        } else {
          throw std::invalid_argument("exact_solution_v: no closed form for this rule");
        }
      },
      bc);
}

ConvergenceResult convergence_study(const RadialProfile& profile, const BoundaryRule& bc,
                                    const SolverConfig& cfg, double t_probe,
                                    const std::vector<int>& grid_sizes, double r_out) {
  if (grid_sizes.size() < 3)
    throw std::invalid_argument("convergence_study: need at least 3 grid sizes");
  for (size_t i = 1; i < grid_sizes.size(); ++i) {
    if (!(grid_sizes[i] > grid_sizes[i - 1]))
      throw std::invalid_argument("convergence_study: grid sizes must be strictly increasing");
  }
  if (!std::holds_alternative<ExactCigar>(bc) && !std::holds_alternative<ShrinkingSphere>(bc))
    throw std::invalid_argument("convergence_study: needs an exact-solution boundary rule");

  ConvergenceResult out;
  out.grid_sizes = grid_sizes;
  const double n0 = double(grid_sizes.front());
  for (int n : grid_sizes) {
    SolverConfig scaled = cfg;
    scaled.dt_max = cfg.dt_max * (n0 / double(n)) * (n0 / double(n));
    scaled.dt_init = std::min(cfg.dt_init, scaled.dt_max);
    const RadialGrid grid = RadialGrid::uniform(n, r_out);
    Trajectory traj = run(profile, grid, bc, scaled, t_probe, {t_probe});
    const FlowState& fin = traj.samples.back();
    double err = 0.0;
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
      err = std::max(err, std::abs(fin.v[i] - exact_solution_v(bc, grid.node(i), t_probe)));
    out.max_errors.push_back(err);
  }

  // least-squares slope of log(err) against log(1/N)
  const size_t m = grid_sizes.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    const double x = -std::log(double(grid_sizes[i]));
    const double y = std::log(out.max_errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.order = (double(m) * sxy - sx * sy) / (double(m) * sxx - sx * sx);
  return out;
}

RadialProfile to_profile(const FlowState& state) {
  return RadialProfile::sampled(state.grid, state.v);
}

}  // namespace solver
}  // namespace cuspflow
