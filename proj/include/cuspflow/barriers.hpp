#pragma once

#include "cuspflow/profiles.hpp"

namespace cuspflow {
namespace barriers {

/// Cigar eps/(delta + r^2) tangent to the unit cusp from below at r0.
struct CigarTangency {
  double r0;
  double eps;
  double delta;
};

/// Sphere beta^2/(1 + beta^2 K0 r^2/4)^2 tangent to alpha^2 h from below
/// at r0, parametrised by the origin root beta = sqrt(u(0)).
struct SphereTangency {
  double alpha;
  double beta;
  double k0;
  double r0;
};

/// Closed-form tangency parameters; domain error outside (0, 1/e), where
/// the system has no positive solution.
CigarTangency cigar_tangency(double r0);

struct TouchReport {
  double max_violation_rel;  // max of (u_cigar - h)/h over the samples
  double at_r;               // where the max is attained
  bool derivative_sign_ok;   // dF/dr > 0 below r0 and < 0 above it
};

/// Samples the touching inequality u_cigar <= h over (0,1) (log-uniform,
/// n_samples points) and checks the sign pattern of the difference
/// function's derivative on both sides of r0.
TouchReport verify_cigar_touch(double r0, int n_samples);

/// The C^1 glued profile: tangent cigar inside r0, unit cusp outside.
RadialProfile capped_cusp_profile(double r0);

/// Exact flow of the tangent cigar in log form:
/// v(r, t) = (1/2) [log eps - log(delta e^{4t/eps} + r^2)], evaluated
/// without materialising the exponential factor.
double cigar_flow(double r0, double r, double t);

struct OriginBound {
  double v_bound;  // 1/(8t) + (1/2)(1 + log 4t)
  double r0_opt;   // e^{-1/(4t)}
};

/// Optimal cigar lower bound for v(0, t); domain error unless 0 < t < 1/4.
OriginBound origin_lower_bound(double t);

/// Inverts beta(r0) = 2 alpha / (r0 (-log r0 + 1)) by bisection (relative
/// tolerance 1e-12 on r0) and evaluates the tangent curvature
/// K0 = (-log r0 - 1)(-log r0 + 1) / alpha^2. Domain error for beta <= alpha e.
SphereTangency sphere_tangency(double alpha, double beta);

/// log of the touching-family barrier w_beta at radius r:
/// the tangent sphere inside r0(beta), alpha^2 h outside.
double log_w_beta(const SphereTangency& s, double r);

struct WitnessResult {
  double k0;     // certified curvature lower bound
  double beta;   // touching barrier parameter
  double r1;     // touching radius (a grid node), r1 < r0(beta)
  double gap_v;  // remaining barrier-field gap in v at r1
};

/// Largest beta whose barrier w_beta dominates the sampled field with
/// touching (within a grid-relative band) at an interior node r1 < r0(beta).
/// Preconditions per the touching argument: u < alpha^2 h on the grid and
/// v(0) >= mu / t.
WitnessResult curvature_witness(const RadialProfile& u_field, double t, double alpha, double mu);

}  // namespace barriers
}  // namespace cuspflow
