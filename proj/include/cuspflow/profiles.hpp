#pragma once

#include <variant>

#include <Eigen/Core>

#include "cuspflow/common.hpp"
#include "cuspflow/grid.hpp"

namespace cuspflow {

// Radially symmetric conformal factors u with g = u (dx^2 + dy^2).
// All values are stored and exchanged in log form v = (1/2) log u; the
// flow reaches u ~ e^{2/t}, which overflows double precision long before
// the times of interest, while v stays O(1/t).

struct Cusp {
  double alpha;  // scale >= 1; u = alpha^2 / (r log r)^2 on (0,1)
};

struct Poincare {};  // u = (2/(1-r^2))^2 on [0,1)

struct Cigar {
  double eps;    // > 0, sets max curvature 2/eps
  double delta;  // > 0, width parameter; u = eps/(delta + r^2)
};

struct Sphere {
  double beta;  // conformal factor at the origin is beta^2
  double k;     // constant Gauss curvature > 0
};

struct CappedCusp {
  double r0;  // cap radius in (0, 1/e)
  double eps;
  double delta;  // tangent-cigar parameters, filled at construction
};

struct Sampled {
  RadialGrid grid;
  Eigen::ArrayXd v;  // per-node log-form values, finite
};

class RadialProfile {
 public:
  using Variant = std::variant<Cusp, Poincare, Cigar, Sphere, CappedCusp, Sampled>;

  static RadialProfile cusp(double alpha);
  static RadialProfile poincare();
  static RadialProfile cigar(double eps, double delta);
  static RadialProfile sphere(double beta, double k);
  static RadialProfile capped_cusp(double r0);
  static RadialProfile sampled(RadialGrid grid, Eigen::ArrayXd v);
  /// Spatially constant u = c, realised as a Sampled field.
  static RadialProfile constant(double u, const RadialGrid& grid);

  const Variant& data() const { return data_; }
  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&data_);
  }

 private:
  explicit RadialProfile(Variant d) : data_(std::move(d)) {}
  Variant data_;
};

// Tangent-cigar closed forms: the cigar eps/(delta + r^2) that touches the
// unit cusp 1/(r log r)^2 from below exactly at r0, for r0 in (0, 1/e).
double cigar_tangent_delta(double r0);
double cigar_tangent_eps(double r0);

/// v(r) = (1/2) log u(r). Throws std::domain_error outside the profile's
/// domain. Sampled profiles interpolate linearly in v between nodes.
double eval_v(const RadialProfile& p, double r);

/// Analytic first and second radial derivatives of v (closed-form
/// variants only; Sampled throws).
double eval_dv(const RadialProfile& p, double r);
double eval_ddv(const RadialProfile& p, double r);

/// Gauss curvature K(r) = -e^{-2v} (v'' + v'/r). Closed-form variants use
/// exact formulas; Sampled uses the nonuniform stencil at the nearest node.
double gauss_curvature(const RadialProfile& p, double r);

/// 2 (v(r) + log r) evaluated stably from log r, i.e. log(u r^2).
/// Finite for cusp-type profiles even when r itself underflows.
double log_u_r2(const RadialProfile& p, double log_r);

/// L1 distance of the metrics over the annulus r_lo < r < r_hi:
/// 2 pi * integral of |u_a - u_b| r dr, by adaptive quadrature with
/// relative tolerance 1e-8. The r = 0 endpoint is handled with the
/// substitution r = exp(-1/s), under which the cusp density is bounded.
double l1_distance(const RadialProfile& a, const RadialProfile& b, double r_lo, double r_hi);

}  // namespace cuspflow
