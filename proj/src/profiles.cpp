#include "cuspflow/profiles.hpp"

#include <cmath>
#include <stdexcept>

namespace cuspflow {

namespace {

void check_radius(double r) {
  if (!(r >= 0.0)) throw std::domain_error("radius must be nonnegative");
}

double interp_v(const Sampled& s, double r) {
  const auto& nodes = s.grid.nodes();
  const Eigen::Index n = nodes.size();
  if (!(r >= 0.0 && r <= nodes[n - 1] * (1.0 + 1e-15)))
    throw std::domain_error("Sampled profile: radius outside [0, r_out]");
  if (r >= nodes[n - 1]) return s.v[n - 1];
  // binary search for the containing interval
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (nodes[mid] <= r)
      lo = mid;
    else
      hi = mid;
  }
  const double w = (r - nodes[lo]) / (nodes[hi] - nodes[lo]);
  return (1.0 - w) * s.v[lo] + w * s.v[hi];
}

}  // namespace

double cigar_tangent_delta(double r0) {
  const double l = -std::log(r0);
  return r0 * r0 / (l - 1.0);
}

double cigar_tangent_eps(double r0) {
  const double l = -std::log(r0);
  return 1.0 / ((l - 1.0) * l);
}

RadialProfile RadialProfile::cusp(double alpha) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("Cusp: alpha must be >= 1");
  return RadialProfile(Cusp{alpha});
}

RadialProfile RadialProfile::poincare() { return RadialProfile(Poincare{}); }

RadialProfile RadialProfile::cigar(double eps, double delta) {
  if (!(eps > 0.0 && delta > 0.0)) throw std::invalid_argument("Cigar: need eps, delta > 0");
  return RadialProfile(Cigar{eps, delta});
}

RadialProfile RadialProfile::sphere(double beta, double k) {
  if (!(beta > 0.0 && k > 0.0)) throw std::invalid_argument("Sphere: need beta, K > 0");
  return RadialProfile(Sphere{beta, k});
}

RadialProfile RadialProfile::capped_cusp(double r0) {
  if (!(r0 > 0.0 && r0 < kInvE))
    throw std::domain_error("CappedCusp: r0 must lie in (0, 1/e)");
  return RadialProfile(CappedCusp{r0, cigar_tangent_eps(r0), cigar_tangent_delta(r0)});
}

RadialProfile RadialProfile::sampled(RadialGrid grid, Eigen::ArrayXd v) {
  if (v.size() != grid.size()) throw std::invalid_argument("Sampled: size mismatch");
  if (!v.isFinite().all()) throw std::invalid_argument("Sampled: v must be finite");
  return RadialProfile(Sampled{std::move(grid), std::move(v)});
}

RadialProfile RadialProfile::constant(double u, const RadialGrid& grid) {
  if (!(u > 0.0)) throw std::invalid_argument("constant: u must be positive");
  return sampled(grid, Eigen::ArrayXd::Constant(grid.size(), 0.5 * std::log(u)));
}

double eval_v(const RadialProfile& p, double r) {
  check_radius(r);
  return std::visit(
      [r](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Cusp>) {
          if (!(r > 0.0 && r < 1.0)) throw std::domain_error("Cusp: domain is (0, 1)");
          const double l = -std::log(r);
          return std::log(q.alpha) + l - std::log(l);
        } else if constexpr (std::is_same_v<T, Poincare>) {
          if (!(r < 1.0)) throw std::domain_error("Poincare: domain is [0, 1)");
          return std::log(2.0) - std::log1p(-r * r);
        } else if constexpr (std::is_same_v<T, Cigar>) {
          return 0.5 * (std::log(q.eps) - std::log(q.delta + r * r));
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return std::log(q.beta) - std::log1p(q.beta * q.beta * q.k * r * r / 4.0);
        } else if constexpr (std::is_same_v<T, CappedCusp>) {
          if (!(r < 1.0)) throw std::domain_error("CappedCusp: domain is [0, 1)");
          if (r <= q.r0) return 0.5 * (std::log(q.eps) - std::log(q.delta + r * r));
          const double l = -std::log(r);
          return l - std::log(l);
        } else {
          return interp_v(q, r);
        }
      },
      p.data());
}

double eval_dv(const RadialProfile& p, double r) {
  check_radius(r);
  return std::visit(
      [r](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Cusp>) {
          if (!(r > 0.0 && r < 1.0)) throw std::domain_error("Cusp: domain is (0, 1)");
          const double l = -std::log(r);
          return -(1.0 - 1.0 / l) / r;
        } else if constexpr (std::is_same_v<T, Poincare>) {
          if (!(r < 1.0)) throw std::domain_error("Poincare: domain is [0, 1)");
          return 2.0 * r / (1.0 - r * r);
        } else if constexpr (std::is_same_v<T, Cigar>) {
          return -r / (q.delta + r * r);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          const double c = q.beta * q.beta * q.k / 4.0;
          return -2.0 * c * r / (1.0 + c * r * r);
        } else if constexpr (std::is_same_v<T, CappedCusp>) {
          if (!(r < 1.0)) throw std::domain_error("CappedCusp: domain is [0, 1)");
          if (r <= q.r0) return -r / (q.delta + r * r);
          const double l = -std::log(r);
          return -(1.0 - 1.0 / l) / r;
        } else {
          throw std::invalid_argument("eval_dv: not defined for Sampled profiles");
        }
      },
      p.data());
}

double eval_ddv(const RadialProfile& p, double r) {
  check_radius(r);
  return std::visit(
      [r](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Cusp>) {
          if (!(r > 0.0 && r < 1.0)) throw std::domain_error("Cusp: domain is (0, 1)");
          const double l = -std::log(r);
          return (1.0 - 1.0 / l + 1.0 / (l * l)) / (r * r);
        } else if constexpr (std::is_same_v<T, Poincare>) {
          if (!(r < 1.0)) throw std::domain_error("Poincare: domain is [0, 1)");
          const double d = 1.0 - r * r;
          return 2.0 * (1.0 + r * r) / (d * d);
        } else if constexpr (std::is_same_v<T, Cigar>) {
          const double w = q.delta + r * r;
          return -(q.delta - r * r) / (w * w);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          const double c = q.beta * q.beta * q.k / 4.0;
          const double qq = 1.0 + c * r * r;
          return -2.0 * c * (1.0 - c * r * r) / (qq * qq);
        } else if constexpr (std::is_same_v<T, CappedCusp>) {
          if (!(r < 1.0)) throw std::domain_error("CappedCusp: domain is [0, 1)");
          if (r <= q.r0) {
            const double w = q.delta + r * r;
            return -(q.delta - r * r) / (w * w);
          }
          const double l = -std::log(r);
          return (1.0 - 1.0 / l + 1.0 / (l * l)) / (r * r);
        } else {
          throw std::invalid_argument("eval_ddv: not defined for Sampled profiles");
        }
      },
      p.data());
}

double gauss_curvature(const RadialProfile& p, double r) {
  check_radius(r);
  return std::visit(
      [r](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Cusp>) {
          if (!(r > 0.0 && r < 1.0)) throw std::domain_error("Cusp: domain is (0, 1)");
          return -1.0 / (q.alpha * q.alpha);
        } else if constexpr (std::is_same_v<T, Poincare>) {
          if (!(r < 1.0)) throw std::domain_error("Poincare: domain is [0, 1)");
          return -1.0;
        } else if constexpr (std::is_same_v<T, Cigar>) {
          return 2.0 * q.delta / (q.eps * (q.delta + r * r));
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return q.k;
        } else if constexpr (std::is_same_v<T, CappedCusp>) {
          if (!(r < 1.0)) throw std::domain_error("CappedCusp: domain is [0, 1)");
          if (r <= q.r0) return 2.0 * q.delta / (q.eps * (q.delta + r * r));
          return -1.0;
        } else {
          if (q.grid.size() < 3)
            throw std::invalid_argument("gauss_curvature: Sampled grid has < 3 nodes");
          if (!(r >= 0.0 && r <= q.grid.r_out() * (1.0 + 1e-15)))
            throw std::domain_error("Sampled profile: radius outside [0, r_out]");
          // nearest node
          const auto& nodes = q.grid.nodes();
          Eigen::Index best = 0;
          double dist = std::abs(r - nodes[0]);
          for (Eigen::Index i = 1; i < nodes.size(); ++i) {
            const double d = std::abs(r - nodes[i]);
            if (d < dist) {
              dist = d;
              best = i;
            }
          }
          return curvature_field(q.grid, q.v)[best];
        }
      },
      p.data());
}

double log_u_r2(const RadialProfile& p, double log_r) {
  if (!(log_r <= 0.0)) throw std::domain_error("log_u_r2: need log r <= 0");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  return std::visit(
      [log_r](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        const double r = std::exp(log_r);
        if constexpr (std::is_same_v<T, Cusp>) {
          return 2.0 * std::log(q.alpha) - 2.0 * std::log(-log_r);
        } else if constexpr (std::is_same_v<T, CappedCusp>) {
          if (log_r > std::log(q.r0)) return -2.0 * std::log(-log_r);
          return std::log(q.eps) - std::log(q.delta + r * r) + 2.0 * log_r;
        } else if constexpr (std::is_same_v<T, Cigar>) {
          return std::log(q.eps) - std::log(q.delta + r * r) + 2.0 * log_r;
        } else if constexpr (std::is_same_v<T, Poincare>) {
          if (r == 0.0) return neg_inf;
          return 2.0 * (std::log(2.0) - std::log1p(-r * r) + log_r);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          if (r == 0.0) return neg_inf;
          return 2.0 * (std::log(q.beta) - std::log1p(q.beta * q.beta * q.k * r * r / 4.0) + log_r);
        } else {
          if (r == 0.0) return neg_inf;
          return 2.0 * (interp_v(q, r) + log_r);
        }
      },
      p.data());
}

}  // namespace cuspflow
