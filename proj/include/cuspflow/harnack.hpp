#pragma once

#include <vector>

#include "cuspflow/solver.hpp"

namespace cuspflow {
namespace harnack {

/// Static gradient bound of the capped-cusp family:
/// F = u^{-1} |grad log((1/2) log u)|^2 in closed form.
struct StaticBound {
  double sup;            // over both pieces
  double sup_cigar;      // cigar piece, r in (0, r0]
  double sup_cusp;       // cusp piece, r in [r0, 1)
  bool cigar_monotone;   // F increasing in r on the cigar piece
};

/// Closed-form F on the cigar piece of the capped cusp.
double cigar_part_F(double eps, double delta, double r);

/// Closed-form F on the cusp piece, (log r + 1)^2 / (log|r log r|)^2,
/// parametrised by a = -log r so the r -> 0 limit is reachable without
/// underflow: F = ((a-1)/(a - log a))^2.
double cusp_part_F_log(double a);
double cusp_part_F(double r);

StaticBound gradient_bound_static(double r0, int n_samples);

enum class HarnackForm { form2, form4 };

/// The Li-Yau quantity sampled at the nodes of a state, with f = log v:
///   form2:  |grad f|_u^2 + K t / v
///   form4:  (1-t) |grad f|_u^2 - t Lap_u f
/// Values are NaN outside the evaluation region (r <= region_r_max with a
/// one-node margin). Requires v >= 1 on the region and t > 0.
struct HarnackField {
  RadialGrid grid;
  Eigen::ArrayXd f_values;
  double t;
  HarnackForm form;
};

HarnackField harnack_F(const solver::FlowState& state, HarnackForm form,
                       double region_r_max = -1.0);  // default: r_out / 2

/// sup over nodes with r <= r_max of |grad log v|_u^2 = e^{-2v} (v'/v)^2.
double sup_grad_log_v(const solver::FlowState& state, double r_max);

struct LiYauResult {
  double sup;                      // sup over windows and nodes of (t - t1) K / v
  std::vector<double> window_t1;   // accepted window base times
  double hypothesis_margin;        // min over windows of 2/t1 - max v
};

/// Checks re-based time windows [t1, (17/16) t1] drawn from the trajectory
/// sample times: each must satisfy max_{r <= 1/2} v <= 2/t1, and the
/// quantity (t - t1) K / v is measured over r <= region_radius with the
/// re-based time. Throws WindowInfeasible if no window qualifies.
LiYauResult liyau_conclusion_check(const solver::Trajectory& traj, double region_radius);

}  // namespace harnack
}  // namespace cuspflow
