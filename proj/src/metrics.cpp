#include <cmath>

#include "cuspflow/profiles.hpp"
#include "cuspflow/quadrature.hpp"

namespace cuspflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

// |u_a - u_b| r  as a function of log r, multiplied by r (i.e. the density
// against d(log r) is |u_a-u_b| r^2). Stable when r underflows.
double abs_diff_u_r2(const RadialProfile& a, const RadialProfile& b, double log_r) {
  const double wa = log_u_r2(a, log_r);
  const double wb = log_u_r2(b, log_r);
  if (wa > 700.0 || wb > 700.0)
    throw QuadratureError("l1_distance: integrand overflows double range", 0.0, 0.0);
  return std::abs(std::exp(wa) - std::exp(wb));
}

}  // namespace

double l1_distance(const RadialProfile& a, const RadialProfile& b, double r_lo, double r_hi) {
  if (!(r_lo >= 0.0 && r_lo < r_hi)) throw std::invalid_argument("l1_distance: need 0 <= r_lo < r_hi");

  const double rel_tol = 1e-8;
  double total = 0.0;

  // Inner region, up to min(r_hi, 1/e): substitute r = exp(-1/s). The cusp
  // density h r^2 equals s^2, so the transformed integrand is bounded and
  // the s = 0 endpoint (r = 0) needs no special handling.
  const double r_split = std::min(r_hi, kInvE);
  double abs_scale = 1.0;  // coarse magnitude for the absolute tolerance floor
  if (r_lo < r_split) {
    const double s_lo = (r_lo == 0.0) ? 0.0 : -1.0 / std::log(r_lo);
    const double s_hi = -1.0 / std::log(r_split);
    auto f = [&](double s) -> double {
      if (s <= 0.0) return 0.0;
      const double log_r = -1.0 / s;
      return 2.0 * kPi * abs_diff_u_r2(a, b, log_r) / (s * s);
    };
    const QuadResult q =
        integrate_adaptive(f, s_lo, s_hi, rel_tol, 1e-14 * abs_scale);
    total += q.value;
    abs_scale = std::max(abs_scale, std::abs(total));
  }

  // Outer region in r directly.
  if (r_hi > r_split) {
    const double lo = std::max(r_lo, r_split);
    auto f = [&](double r) -> double {
      return 2.0 * kPi * abs_diff_u_r2(a, b, std::log(r)) / r;
    };
    const QuadResult q = integrate_adaptive(f, lo, r_hi, rel_tol, 1e-14 * abs_scale);
    total += q.value;
  }
  return total;
}

}  // namespace cuspflow
