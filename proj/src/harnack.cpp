#include "cuspflow/harnack.hpp"

#include <cmath>
#include <stdexcept>

namespace cuspflow {
namespace harnack {

double cigar_part_F(double eps, double delta, double r) {
  if (!(r > 0.0)) return 0.0;  // gradient vanishes at the origin
  const double denom = std::log(eps) - std::log(delta + r * r);
  return (1.0 / eps) * (1.0 / (1.0 + delta / (r * r))) * 4.0 / (denom * denom);
}

double cusp_part_F_log(double a) {
  if (!(a > 0.0)) throw std::domain_error("cusp_part_F_log: need a = -log r > 0");
  const double num = a - 1.0;
  const double den = a - std::log(a);
  return (num * num) / (den * den);
}

double cusp_part_F(double r) {
  if (!(r > 0.0 && r < 1.0)) throw std::domain_error("cusp_part_F: domain is (0,1)");
  return cusp_part_F_log(-std::log(r));
}

StaticBound gradient_bound_static(double r0, int n_samples) {
  if (!(r0 > 0.0 && r0 < kInvE))
    throw std::domain_error("gradient_bound_static: r0 must lie in (0, 1/e)");
  if (n_samples < 100) throw std::invalid_argument("gradient_bound_static: need >= 100 samples");
  const double eps = cigar_tangent_eps(r0);
  const double delta = cigar_tangent_delta(r0);

  StaticBound out{0.0, 0.0, 0.0, true};
  // Cigar piece: log-uniform on (r0 * 1e-6, r0].
  double prev = -1.0;
  for (int i = 0; i <= n_samples; ++i) {
    const double log_r = std::log(r0) + std::log(1e-6) * (1.0 - double(i) / n_samples);
    const double f = cigar_part_F(eps, delta, std::exp(log_r));
    if (f < prev) out.cigar_monotone = false;
    prev = f;
    out.sup_cigar = std::max(out.sup_cigar, f);
  }
  // Cusp piece: log-uniform on [r0, 1).
  for (int i = 0; i <= n_samples; ++i) {
    const double log_r = std::log(r0) * (1.0 - double(i) / n_samples) +
                         std::log(1.0 - 1e-9) * (double(i) / n_samples);
    out.sup_cusp = std::max(out.sup_cusp, cusp_part_F(std::exp(log_r)));
  }
  out.sup = std::max(out.sup_cigar, out.sup_cusp);
  return out;
}

namespace {

// f' and Lap f of a node field by the shared radial stencils.
void field_derivatives(const RadialGrid& grid, const Eigen::ArrayXd& f, Eigen::Index i,
                       double& d1, double& lap) {
  const Eigen::Index n = grid.size();
  if (i == 0) {
    const double r1 = grid.node(1);
    d1 = 0.0;
    lap = 4.0 * (f[1] - f[0]) / (r1 * r1);
    return;
  }
  const Eigen::Index j = (i == n - 1) ? n - 2 : i;  // one-sided fit at the outer node
  const double x0 = grid.node(j - 1), x1 = grid.node(j), x2 = grid.node(j + 1);
  const double y0 = f[j - 1], y1 = f[j], y2 = f[j + 1];
  const double x = grid.node(i);
  const double l0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
  d1 = y0 * l0 + y1 * l1 + y2 * l2;
  const double d2 = 2.0 * (y0 / ((x0 - x1) * (x0 - x2)) + y1 / ((x1 - x0) * (x1 - x2)) +
                           y2 / ((x2 - x0) * (x2 - x1)));
  lap = d2 + d1 / x;
}

}  // namespace

HarnackField harnack_F(const solver::FlowState& state, HarnackForm form, double region_r_max) {
  if (!(state.t > 0.0)) throw PreconditionError("harnack_F: needs t > 0");
  const RadialGrid& grid = state.grid;
  if (region_r_max < 0.0) region_r_max = 0.5 * grid.r_out();
  const Eigen::Index limit = grid.last_node_within(region_r_max);
  if (limit < 2) throw std::invalid_argument("harnack_F: region holds too few nodes");

  for (Eigen::Index i = 0; i <= limit; ++i) {
    if (!(state.v[i] >= 1.0))
      throw PreconditionError("harnack_F: v < 1 in the evaluation region (f = log v undefined)");
  }

  HarnackField out{grid, Eigen::ArrayXd::Constant(grid.size(), kNaN), state.t, form};
  const Eigen::ArrayXd f = state.v.log();
  const Eigen::ArrayXd curvature = curvature_field(grid, state.v);
  const double t = state.t;
  for (Eigen::Index i = 0; i <= limit; ++i) {
    const double e2v = std::exp(-2.0 * state.v[i]);
    double df, lap_f;
    field_derivatives(grid, f, i, df, lap_f);
    const double grad_sq = e2v * df * df;       // |grad f|_u^2
    if (form == HarnackForm::form2) {
      out.f_values[i] = grad_sq + curvature[i] * t / state.v[i];
    } else {
      out.f_values[i] = (1.0 - t) * grad_sq - t * e2v * lap_f;
    }
  }
  return out;
}

double sup_grad_log_v(const solver::FlowState& state, double r_max) {
  constexpr double eps_mach = 2.22e-16;
  const RadialGrid& grid = state.grid;
  const Eigen::Index limit = grid.last_node_within(r_max);
  const Eigen::ArrayXd f = state.v.log();
  double sup = 0.0;
  for (Eigen::Index i = 1; i <= limit && i + 1 < grid.size(); ++i) {
    double abs_scale = 0.0;
    const double df = sampled_d1(grid, f, i, &abs_scale);
    // skip stencil values below the cancellation floor (the flat core,
    // where the true gradient is negligible but unresolvable)
    if (std::abs(df) < 100.0 * eps_mach * abs_scale) continue;
    sup = std::max(sup, std::exp(-2.0 * state.v[i]) * df * df);
  }
  return sup;
}

LiYauResult liyau_conclusion_check(const solver::Trajectory& traj, double region_radius) {
  if (!(region_radius > 0.0 && region_radius <= 0.25))
    throw std::invalid_argument("liyau_conclusion_check: region radius must be <= 1/4");
  const auto& samples = traj.samples;
  if (samples.size() < 2) throw WindowInfeasible("liyau_conclusion_check: trajectory too short");

  LiYauResult out{0.0, {}, std::numeric_limits<double>::infinity()};
  for (size_t a = 0; a < samples.size(); ++a) {
    const double t1 = samples[a].t;
    const double t_hi = t1 * 17.0 / 16.0;
    // gather strictly-later samples inside the window
    std::vector<size_t> in_window;
    for (size_t b = a + 1; b < samples.size(); ++b) {
      if (samples[b].t > t1 && samples[b].t <= t_hi * (1.0 + 1e-12)) in_window.push_back(b);
    }
    if (in_window.empty()) continue;

    // Hypothesis: max over the window (including its base) of v on B_{1/2}
    // stays below 2/t1, i.e. t0 = t1/16 <= 1/(8 max v).
    double max_v = -std::numeric_limits<double>::infinity();
    const Eigen::Index half = samples[a].grid.last_node_within(0.5);
    auto window_max_v = [&](const solver::FlowState& s) {
      for (Eigen::Index i = 0; i <= half; ++i) max_v = std::max(max_v, s.v[i]);
    };
    window_max_v(samples[a]);
    for (size_t b : in_window) window_max_v(samples[b]);
    if (!(max_v <= 2.0 / t1)) continue;
    out.hypothesis_margin = std::min(out.hypothesis_margin, 2.0 / t1 - max_v);
    out.window_t1.push_back(t1);

    for (size_t b : in_window) {
      const solver::FlowState& s = samples[b];
      const Eigen::Index limit = s.grid.last_node_within(region_radius);
      const Eigen::ArrayXd curvature = curvature_field(s.grid, s.v);
      // skip nodes whose stencil value is below the cancellation floor
      const Eigen::ArrayXd noise = curvature_noise_floor(s.grid, s.v);
      const double tau = s.t - t1;
      for (Eigen::Index i = 0; i <= limit; ++i) {
        if (!(s.v[i] >= 1.0))
          throw PreconditionError("liyau_conclusion_check: v < 1 in the region");
        if (std::abs(curvature[i]) < 100.0 * noise[i]) continue;
        out.sup = std::max(out.sup, tau * curvature[i] / s.v[i]);
      }
    }
  }
  if (out.window_t1.empty())
    throw WindowInfeasible("liyau_conclusion_check: no window satisfies the smallness hypothesis");
  return out;
}

}  // namespace harnack
}  // namespace cuspflow
