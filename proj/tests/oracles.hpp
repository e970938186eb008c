#pragma once

// Test-only oracles, independent of the library's analytic-derivative and
// adaptive-quadrature code paths.

#include <cmath>
#include <functional>

#include "cuspflow/profiles.hpp"

namespace oracles {

// Richardson-extrapolated central finite differences of
// K = -e^{-2v} (v'' + v'/r) built from eval_v alone.
inline double fd_gauss_curvature(const cuspflow::RadialProfile& p, double r, double h) {
  using cuspflow::eval_v;
  auto lap = [&](double step) {
    if (r == 0.0) return 4.0 * (eval_v(p, step) - eval_v(p, 0.0)) / (step * step);
    const double vp = eval_v(p, r + step), vm = eval_v(p, r - step), v0 = eval_v(p, r);
    const double d2 = (vp - 2.0 * v0 + vm) / (step * step);
    const double d1 = (vp - vm) / (2.0 * step);
    return d2 + d1 / r;
  };
  const double coarse = lap(h), fine = lap(0.5 * h);
  const double extrapolated = (4.0 * fine - coarse) / 3.0;
  return -std::exp(-2.0 * eval_v(p, r)) * extrapolated;
}

// Plain composite Simpson on a fixed refinement; no adaptivity shared with
// the implementation under test.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// L1 metric distance by Simpson in the substituted variable s (r = e^{-1/s}),
// which keeps cusp-type densities bounded near r = 0.
inline double l1_distance_oracle(const cuspflow::RadialProfile& a,
                                 const cuspflow::RadialProfile& b, double r_lo, double r_hi,
                                 int n = 400000) {
  using cuspflow::log_u_r2;
  const double pi = 3.14159265358979323846;
  auto density = [&](double log_r) {
    return std::abs(std::exp(log_u_r2(a, log_r)) - std::exp(log_u_r2(b, log_r)));
  };
  double total = 0.0;
  const double split = std::min(r_hi, cuspflow::kInvE);
  if (r_lo < split) {
    const double s_lo = (r_lo == 0.0) ? 1e-12 : -1.0 / std::log(r_lo);
    const double s_hi = -1.0 / std::log(split);
    total += simpson([&](double s) { return 2.0 * pi * density(-1.0 / s) / (s * s); }, s_lo,
                     s_hi, n);
  }
  if (r_hi > split) {
    total += simpson([&](double r) { return 2.0 * pi * density(std::log(r)) / r; },
                     std::max(r_lo, split), r_hi, n);
  }
  return total;
}

}  // namespace oracles
