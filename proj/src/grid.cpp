#include "cuspflow/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace cuspflow {

RadialGrid::RadialGrid(Eigen::ArrayXd nodes) : nodes_(std::move(nodes)) {
  const Eigen::Index n = nodes_.size();
  if (n < 17) throw std::invalid_argument("RadialGrid: need at least 16 intervals");
  if (nodes_[0] != 0.0) throw std::invalid_argument("RadialGrid: first node must be r = 0");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
  }
  if (!(nodes_[n - 1] < 1.0)) throw std::invalid_argument("RadialGrid: r_out must be < 1");
  if (n >= 3) ratio_ = (nodes_[2] - nodes_[1]) / (nodes_[1] - nodes_[0]);
}

RadialGrid RadialGrid::uniform(int n_intervals, double r_out) {
  if (n_intervals < 16) throw std::invalid_argument("RadialGrid: need at least 16 intervals");
  Eigen::ArrayXd nodes(n_intervals + 1);
  for (int i = 0; i <= n_intervals; ++i) nodes[i] = r_out * double(i) / double(n_intervals);
  nodes[0] = 0.0;
  nodes[n_intervals] = r_out;
  return RadialGrid(std::move(nodes));
}

RadialGrid RadialGrid::geometric(int n_intervals, double r_inner, double r_out) {
  if (n_intervals < 16) throw std::invalid_argument("RadialGrid: need at least 16 intervals");
  if (!(r_inner > 0.0 && r_inner < r_out))
    throw std::invalid_argument("RadialGrid: need 0 < r_inner < r_out");
  Eigen::ArrayXd nodes(n_intervals + 1);
  nodes[0] = 0.0;
  const double step = std::log(r_out / r_inner) / double(n_intervals - 1);
  for (int i = 1; i <= n_intervals; ++i) nodes[i] = r_inner * std::exp(step * double(i - 1));
  nodes[n_intervals] = r_out;
  RadialGrid g(std::move(nodes));
  g.ratio_ = std::exp(step);
  return g;
}

Eigen::Index RadialGrid::last_node_within(double r_max) const {
  Eigen::Index k = -1;
  for (Eigen::Index i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] <= r_max) k = i;
  }
  return k;
}

RadialLaplacian radial_laplacian(const RadialGrid& grid) {
  const Eigen::Index n_rows = grid.size() - 1;  // unknown rows 0..N-1
  RadialLaplacian op;
  op.lower = Eigen::ArrayXd::Zero(n_rows);
  op.diag = Eigen::ArrayXd::Zero(n_rows);
  op.upper = Eigen::ArrayXd::Zero(n_rows);

  // Origin: v'(0) = 0 by symmetry, so L v(0) = 2 v''(0) = 4 (v_1 - v_0)/r_1^2.
  const double r1 = grid.node(1);
  op.diag[0] = -4.0 / (r1 * r1);
  op.upper[0] = 4.0 / (r1 * r1);

  for (Eigen::Index i = 1; i < n_rows; ++i) {
    const double hm = grid.node(i) - grid.node(i - 1);
    const double hp = grid.node(i + 1) - grid.node(i);
    const double r = grid.node(i);
    const double denom = hm + hp;
    // v'' part
    double a = 2.0 / (hm * denom);
    double b = -2.0 / (hm * hp);
    double c = 2.0 / (hp * denom);
    // v'/r part
    a += -hp / (r * hm * denom);
    b += (hp - hm) / (r * hm * hp);
    c += hm / (r * hp * denom);
    op.lower[i] = a;
    op.diag[i] = b;
    op.upper[i] = c;
  }
  return op;
}

Eigen::ArrayXd RadialLaplacian::apply(const Eigen::ArrayXd& v) const {
  const Eigen::Index n_rows = diag.size();
  Eigen::ArrayXd out(n_rows);
  out[0] = diag[0] * v[0] + upper[0] * v[1];
  for (Eigen::Index i = 1; i < n_rows; ++i)
    out[i] = lower[i] * v[i - 1] + diag[i] * v[i] + upper[i] * v[i + 1];
  return out;
}

Eigen::ArrayXd RadialLaplacian::apply_abs(const Eigen::ArrayXd& v) const {
  const Eigen::Index n_rows = diag.size();
  Eigen::ArrayXd out(n_rows);
  out[0] = std::abs(diag[0] * v[0]) + std::abs(upper[0] * v[1]);
  for (Eigen::Index i = 1; i < n_rows; ++i)
    out[i] = std::abs(lower[i] * v[i - 1]) + std::abs(diag[i] * v[i]) +
             std::abs(upper[i] * v[i + 1]);
  return out;
}

namespace {

// Derivatives of the quadratic through (x0,y0),(x1,y1),(x2,y2), at x.
void quadratic_derivs(double x0, double y0, double x1, double y1, double x2, double y2,
                      double x, double& d1, double& d2, double* d1_abs = nullptr) {
  const double l0 = (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
  d1 = y0 * l0 + y1 * l1 + y2 * l2;
  d2 = 2.0 * (y0 / ((x0 - x1) * (x0 - x2)) + y1 / ((x1 - x0) * (x1 - x2)) +
              y2 / ((x2 - x0) * (x2 - x1)));
  if (d1_abs != nullptr)
    *d1_abs = std::abs(y0 * l0) + std::abs(y1 * l1) + std::abs(y2 * l2);
}

}  // namespace

double sampled_d1(const RadialGrid& grid, const Eigen::ArrayXd& v, Eigen::Index i,
                  double* abs_scale) {
  const Eigen::Index n = grid.size();
  if (i == 0) {
    if (abs_scale != nullptr) *abs_scale = 0.0;
    return 0.0;  // radial symmetry
  }
  double d1, d2;
  if (i == n - 1) {
    quadratic_derivs(grid.node(n - 3), v[n - 3], grid.node(n - 2), v[n - 2], grid.node(n - 1),
                     v[n - 1], grid.node(n - 1), d1, d2, abs_scale);
  } else {
    quadratic_derivs(grid.node(i - 1), v[i - 1], grid.node(i), v[i], grid.node(i + 1), v[i + 1],
                     grid.node(i), d1, d2, abs_scale);
  }
  return d1;
}

Eigen::ArrayXd curvature_field(const RadialGrid& grid, const Eigen::ArrayXd& v) {
  const Eigen::Index n = grid.size();
  if (n < 3) throw std::invalid_argument("curvature_field: need at least 3 nodes");
  if (v.size() != n) throw std::invalid_argument("curvature_field: size mismatch");
  Eigen::ArrayXd k(n);

  const double r1 = grid.node(1);
  double lap0 = 4.0 * (v[1] - v[0]) / (r1 * r1);
  k[0] = -std::exp(-2.0 * v[0]) * lap0;

  for (Eigen::Index i = 1; i < n - 1; ++i) {
    double d1, d2;
    quadratic_derivs(grid.node(i - 1), v[i - 1], grid.node(i), v[i], grid.node(i + 1), v[i + 1],
                     grid.node(i), d1, d2);
    k[i] = -std::exp(-2.0 * v[i]) * (d2 + d1 / grid.node(i));
  }

  double d1, d2;
  quadratic_derivs(grid.node(n - 3), v[n - 3], grid.node(n - 2), v[n - 2], grid.node(n - 1),
                   v[n - 1], grid.node(n - 1), d1, d2);
  k[n - 1] = -std::exp(-2.0 * v[n - 1]) * (d2 + d1 / grid.node(n - 1));
  return k;
}

Eigen::ArrayXd curvature_noise_floor(const RadialGrid& grid, const Eigen::ArrayXd& v) {
  constexpr double eps_mach = 2.22e-16;
  const RadialLaplacian lap = radial_laplacian(grid);
  const Eigen::ArrayXd abs_sum = lap.apply_abs(v);
  Eigen::ArrayXd noise(grid.size());
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
    noise[i] = eps_mach * std::exp(-2.0 * v[i]) * abs_sum[i];
  noise[grid.size() - 1] = std::numeric_limits<double>::infinity();
  return noise;
}

}  // namespace cuspflow
