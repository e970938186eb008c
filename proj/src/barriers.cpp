#include "cuspflow/barriers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cuspflow {
namespace barriers {

namespace {

void check_r0(double r0) {
  if (!(r0 > 0.0 && r0 < kInvE))
    throw std::domain_error("tangency radius must lie in (0, 1/e)");
}

double log_h(double r) {  // log of the unit cusp density
  const double l = -std::log(r);
  return -2.0 * (std::log(r) + std::log(l));
}

}  // namespace

CigarTangency cigar_tangency(double r0) {
  check_r0(r0);
  return {r0, cigar_tangent_eps(r0), cigar_tangent_delta(r0)};
}

TouchReport verify_cigar_touch(double r0, int n_samples) {
  check_r0(r0);
  if (n_samples < 100) throw std::invalid_argument("verify_cigar_touch: need >= 100 samples");
  const CigarTangency tg = cigar_tangency(r0);

  TouchReport report{-std::numeric_limits<double>::infinity(), 0.0, true};
  const double lo = std::log(1e-12);
  const double hi = std::log(1.0 - 1e-9);
  const double b = -std::log(r0);
  for (int i = 0; i < n_samples; ++i) {
    const double log_r = lo + (hi - lo) * (double(i) + 0.5) / double(n_samples);
    const double r = std::exp(log_r);
    const double log_cigar = std::log(tg.eps) - std::log(tg.delta + r * r);
    const double viol = std::expm1(log_cigar - log_h(r));  // (u_cigar - h)/h
    if (viol > report.max_violation_rel) {
      report.max_violation_rel = viol;
      report.at_r = r;
    }
    // F(r) = r^2 log^2 r - (-log r0)(r0^2 + (-log r0 - 1) r^2) has
    // F'(r) = 2 r (a + b - 1)(a - b) with a = -log r: positive below r0
    // (a > b), negative above, so F attains its maximum 0 at r0.
    const double a = -log_r;
    const double fprime = 2.0 * r * (a + b - 1.0) * (a - b);
    if (std::abs(std::log(r / r0)) > 1e-6) {
      const bool ok = (r < r0) ? (fprime > 0.0) : (fprime < 0.0);
      if (!ok) report.derivative_sign_ok = false;
    }
  }
  return report;
}

RadialProfile capped_cusp_profile(double r0) { return RadialProfile::capped_cusp(r0); }

double cigar_flow(double r0, double r, double t) {
  check_r0(r0);
  if (!(t >= 0.0)) throw std::domain_error("cigar_flow: need t >= 0");
  if (!(r >= 0.0)) throw std::domain_error("cigar_flow: need r >= 0");
  const CigarTangency tg = cigar_tangency(r0);
  const double log_delta_t = std::log(tg.delta) + 4.0 * t / tg.eps;
  const double log_r2 =
      (r > 0.0) ? 2.0 * std::log(r) : -std::numeric_limits<double>::infinity();
  return 0.5 * (std::log(tg.eps) - log_sum_exp(log_delta_t, log_r2));
}

OriginBound origin_lower_bound(double t) {
  if (!(t > 0.0 && t < 0.25))
    throw std::domain_error("origin_lower_bound: need 0 < t < 1/4");
  OriginBound out;
  out.r0_opt = std::exp(-1.0 / (4.0 * t));
  out.v_bound = 1.0 / (8.0 * t) + 0.5 * (1.0 + std::log(4.0 * t));
  return out;
}

namespace {

// beta as a function of the tangency radius; strictly decreasing on (0, 1/e).
double beta_of_r0(double alpha, double r0) {
  return 2.0 * alpha / (r0 * (-std::log(r0) + 1.0));
}

double k0_of_r0(double alpha, double r0) {
  const double l = -std::log(r0);
  return (l - 1.0) * (l + 1.0) / (alpha * alpha);
}

}  // namespace

SphereTangency sphere_tangency(double alpha, double beta) {
  if (!(alpha >= 1.0)) throw std::domain_error("sphere_tangency: need alpha >= 1");
  const double alpha_e = alpha * std::exp(1.0);
  if (!(beta > alpha_e))
    throw std::domain_error("sphere_tangency: no tangent sphere for beta <= alpha e");

  // Bracket in log r0: beta_of_r0 decreases from +inf to alpha*e on (0, 1/e).
  double log_hi = -1.0;  // r0 = 1/e, beta = alpha e < beta
  double log_lo = -2.0;
  for (int i = 0; i < 1100 && beta_of_r0(alpha, std::exp(log_lo)) <= beta; ++i) log_lo -= 0.66;
  if (beta_of_r0(alpha, std::exp(log_lo)) <= beta)
    throw SearchFailure("sphere_tangency: failed to bracket r0");

  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (beta_of_r0(alpha, std::exp(mid)) > beta)
      log_lo = mid;
    else
      log_hi = mid;
    if (log_hi - log_lo < 1e-12) break;  // relative tolerance on r0
  }
  const double r0 = std::exp(0.5 * (log_lo + log_hi));
  return {alpha, beta, k0_of_r0(alpha, r0), r0};
}

double log_w_beta(const SphereTangency& s, double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("log_w_beta: domain is [0, 1)");
  if (r >= s.r0) return 2.0 * std::log(s.alpha) + log_h(r);
  const double c = s.beta * s.beta * s.k0 / 4.0;
  return 2.0 * (std::log(s.beta) - std::log1p(c * r * r));
}

WitnessResult curvature_witness(const RadialProfile& u_field, double t, double alpha,
                                double mu) {
  const Sampled* field = u_field.get_if<Sampled>();
  if (field == nullptr)
    throw std::invalid_argument("curvature_witness: needs a Sampled profile");
  if (!(t > 0.0)) throw std::domain_error("curvature_witness: need t > 0");
  const RadialGrid& grid = field->grid;
  const Eigen::ArrayXd& v = field->v;
  const Eigen::Index n = grid.size();

  // Preconditions of the touching argument.
  const double log_alpha = std::log(alpha);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double v_cap = log_alpha + 0.5 * log_h(grid.node(i));
    if (v[i] > v_cap + 1e-9)
      throw PreconditionError("curvature_witness: field exceeds alpha^2 h at r = " +
                              std::to_string(grid.node(i)));
  }
  if (v[0] < mu / t)
    throw PreconditionError("curvature_witness: v(0) < mu/t");

  const double alpha_e = alpha * std::exp(1.0);
  auto min_gap = [&](double log_beta, Eigen::Index& argmin) -> double {
    const SphereTangency s = sphere_tangency(alpha, std::exp(log_beta));
    double best = std::numeric_limits<double>::infinity();
    argmin = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gap = 0.5 * log_w_beta(s, grid.node(i)) - v[i];
      if (gap < best) {
        best = gap;
        argmin = i;
      }
    }
    return best;
  };

  // Bracket: large beta dominates (the barrier's inner floor alpha^2 h(r0)
  // diverges); beta just above alpha e must fail, else there is no touching.
  Eigen::Index arg;
  double lb_hi = std::max(v[0], std::log(alpha_e) + 1.0);
  int grows = 0;
  while (min_gap(lb_hi, arg) < 0.0) {
    lb_hi += 1.0;
    if (++grows > 400) throw SearchFailure("curvature_witness: no dominating barrier found");
  }
  double lb_lo = std::log(alpha_e) + 1e-9;
  if (min_gap(lb_lo, arg) >= 0.0)
    throw SearchFailure("curvature_witness: no touching beta > alpha e exists");

  // Bisect on log beta; keep lb_hi on the dominating side and stop once the
  // touching band (grid-relative, 1e-6 in u, i.e. 5e-7 in v) is reached.
  const double band_v = 0.5e-6;
  double gap_hi = min_gap(lb_hi, arg);
  Eigen::Index arg_hi = arg;
  for (int i = 0; i < 200 && gap_hi > band_v; ++i) {
    const double mid = 0.5 * (lb_lo + lb_hi);
    const double g = min_gap(mid, arg);
    if (g >= 0.0) {
      lb_hi = mid;
      gap_hi = g;
      arg_hi = arg;
    } else {
      lb_lo = mid;
    }
  }

  const SphereTangency s = sphere_tangency(alpha, std::exp(lb_hi));
  const double r1 = grid.node(arg_hi);
  if (!(r1 < s.r0) || arg_hi == n - 1)
    throw SearchFailure("curvature_witness: touching at an inadmissible radius");
  return {s.k0, s.beta, r1, gap_hi};
}

}  // namespace barriers
}  // namespace cuspflow
