#pragma once

#include <Eigen/Core>

#include "cuspflow/common.hpp"

namespace cuspflow {

/// Nonuniform radial mesh 0 = r_0 < r_1 < ... < r_N = r_out < 1.
///
/// The first node is always the origin. Construction enforces at least
/// 16 intervals, strict monotonicity and r_out < 1.
class RadialGrid {
 public:
  RadialGrid() = default;  // empty placeholder; factories produce valid grids
  explicit RadialGrid(Eigen::ArrayXd nodes);

  /// Equispaced nodes on [0, r_out].
  static RadialGrid uniform(int n_intervals, double r_out);

  /// Origin node plus a geometric progression from r_inner to r_out.
  /// Clusters nodes near r = 0; the per-interval ratio is
  /// (r_out/r_inner)^{1/(n_intervals-1)}.
  static RadialGrid geometric(int n_intervals, double r_inner, double r_out);

  Eigen::Index size() const { return nodes_.size(); }  // node count N+1
  double node(Eigen::Index i) const { return nodes_[i]; }
  const Eigen::ArrayXd& nodes() const { return nodes_; }
  double r_out() const { return nodes_[nodes_.size() - 1]; }
  double ratio() const { return ratio_; }  // clustering descriptor

  /// Index of the last node with r <= r_max (-1 if none).
  Eigen::Index last_node_within(double r_max) const;

 private:
  Eigen::ArrayXd nodes_;
  double ratio_ = 1.0;
};

/// Tridiagonal stencil rows of the radial Laplacian  L v = v'' + v'/r
/// on a RadialGrid. Row i couples nodes i-1, i, i+1; row 0 is the
/// origin symmetry stencil 4 (v_1 - v_0) / r_1^2. There is no row for
/// the boundary node N (it is held by a Dirichlet rule).
struct RadialLaplacian {
  Eigen::ArrayXd lower;  // coefficient of v_{i-1}, rows 1..N-1
  Eigen::ArrayXd diag;   // coefficient of v_i,     rows 0..N-1
  Eigen::ArrayXd upper;  // coefficient of v_{i+1}, rows 0..N-1

  /// Apply to a full node vector v (size N+1); result has size N.
  Eigen::ArrayXd apply(const Eigen::ArrayXd& v) const;

  /// Sum of |coefficient * v_j| per row: the cancellation scale of apply(),
  /// which bounds the attainable floating-point accuracy of the stencil.
  Eigen::ArrayXd apply_abs(const Eigen::ArrayXd& v) const;
};

RadialLaplacian radial_laplacian(const RadialGrid& grid);

/// First-derivative stencil value at node i (central for interior nodes,
/// one-sided quadratic at the two ends, exact zero at the origin by symmetry).
/// When abs_scale is non-null it receives sum|c_j v_j|, the cancellation
/// scale bounding the stencil's floating-point resolution.
double sampled_d1(const RadialGrid& grid, const Eigen::ArrayXd& v, Eigen::Index i,
                  double* abs_scale = nullptr);

/// Gauss curvature K = -e^{-2v} (v'' + v'/r) of a sampled field at every
/// node. Interior nodes use the nonuniform three-point stencil, the origin
/// the symmetry stencil and the outer boundary a one-sided quadratic fit.
Eigen::ArrayXd curvature_field(const RadialGrid& grid, const Eigen::ArrayXd& v);

/// Rounding floor of curvature_field per node: eps * e^{-2v} * sum|L_ij v_j|.
/// Where |K| is not well above this, the stencil value is cancellation
/// noise, not curvature (the deep core of clustered grids once e^{-2v}
/// stops being astronomically small). The boundary node is set to +inf.
Eigen::ArrayXd curvature_noise_floor(const RadialGrid& grid, const Eigen::ArrayXd& v);

}  // namespace cuspflow
