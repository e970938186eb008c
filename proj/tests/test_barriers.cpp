#include <cmath>

#include <doctest.h>

#include "cuspflow/barriers.hpp"
#include "cuspflow/grid.hpp"
#include "cuspflow/solver.hpp"
#include "oracles.hpp"

using namespace cuspflow;
using namespace cuspflow::barriers;

namespace {
constexpr double kE = 2.718281828459045;

// golden-section maximiser over [a, b]
double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double phi = 0.6180339887498949;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}
}  // namespace

TEST_CASE("cigar_tangency closed forms at r0 = e^-2") {
  // oracle: the two tangency equations, evaluated directly
  const auto tg = cigar_tangency(std::exp(-2.0));
  CHECK(tg.eps == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tg.delta == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
  const RadialProfile cig = RadialProfile::cigar(tg.eps, tg.delta);
  const RadialProfile cusp = RadialProfile::cusp(1.0);
  const double r0 = std::exp(-2.0);
  CHECK(eval_v(cig, r0) == doctest::Approx(eval_v(cusp, r0)).epsilon(1e-13));
  CHECK(eval_dv(cig, r0) == doctest::Approx(eval_dv(cusp, r0)).epsilon(1e-12));
}

TEST_CASE("cigar_tangency domain") {
  CHECK_THROWS_AS(cigar_tangency(kInvE), std::domain_error);
  CHECK_THROWS_AS(cigar_tangency(0.0), std::domain_error);
  CHECK_THROWS_AS(cigar_tangency(0.5), std::domain_error);
}

TEST_CASE("verify_cigar_touch") {
  const auto rep = verify_cigar_touch(std::exp(-2.0), 10000);
  CHECK(rep.max_violation_rel <= 1e-10);
  CHECK(rep.derivative_sign_ok);
  CHECK_THROWS_AS(verify_cigar_touch(std::exp(-2.0), 50), std::invalid_argument);
  // the difference function r^2 log^2 r - (-log r0)(r0^2 + (-log r0 - 1) r^2)
  // vanishes at the tangency radius
  for (double r0 : {std::exp(-2.0), 0.05}) {
    const double big_l = -std::log(r0);
    const double f_at_r0 =
        r0 * r0 * big_l * big_l - big_l * (r0 * r0 + (big_l - 1.0) * r0 * r0);
    CHECK(std::abs(f_at_r0) <= 1e-15 * r0 * r0 * big_l * big_l);
  }
}

TEST_CASE("envelope: the cusp is the sup of its tangent cigars") {
  for (double r : {std::exp(-3.0), 0.05, 0.2}) {
    auto fam = [r](double log_r0) {
      const double r0 = std::exp(log_r0);
      return 0.5 * (std::log(cigar_tangent_eps(r0)) - std::log(cigar_tangent_delta(r0) + r * r));
    };
    const double star = golden_max(fam, std::log(r * 1e-3), std::log(kInvE * (1 - 1e-12)));
    CHECK(std::exp(star) == doctest::Approx(r).epsilon(1e-4));
    CHECK(fam(star) == doctest::Approx(eval_v(RadialProfile::cusp(1.0), r)).epsilon(1e-9));
  }
}

TEST_CASE("capped_cusp_profile gluing and floor") {
  const double r0 = std::exp(-2.5);
  const RadialProfile cc = capped_cusp_profile(r0);
  const auto tg = cigar_tangency(r0);
  CHECK(eval_v(cc, r0) == doctest::Approx(eval_v(RadialProfile::cusp(1.0), r0)).epsilon(1e-13));
  CHECK(eval_v(cc, r0) ==
        doctest::Approx(eval_v(RadialProfile::cigar(tg.eps, tg.delta), r0)).epsilon(1e-13));
  CHECK(eval_v(cc, kInvE) == doctest::Approx(1.0).epsilon(1e-13));
  for (int i = 0; i <= 1000; ++i) {
    const double r = 1e-9 + (1.0 - 2e-6) * i / 1000.0;
    CHECK(eval_v(cc, r) >= 1.0 - 1e-12);
  }
}

TEST_CASE("capped cusps decrease in r0") {
  const RadialProfile inner = capped_cusp_profile(std::exp(-6.0));
  const RadialProfile outer = capped_cusp_profile(std::exp(-3.0));
  for (int i = 0; i < 50; ++i) {
    const double r = std::exp(std::log(1e-9) + (std::log(0.999) - std::log(1e-9)) * i / 49.0);
    CHECK(eval_v(inner, r) >= eval_v(outer, r) - 1e-13);
  }
}

TEST_CASE("cigar_flow") {
  const double r0 = std::exp(-2.0);
  const auto tg = cigar_tangency(r0);
  const RadialProfile cig = RadialProfile::cigar(tg.eps, tg.delta);
  SUBCASE("t = 0 reduces to the static cigar") {
    for (double r : {0.0, 0.01, 0.3, 2.0})
      CHECK(cigar_flow(r0, r, 0.0) == doctest::Approx(eval_v(cig, r)).epsilon(1e-14));
  }
  SUBCASE("solves du/dt = Lap log u (finite-difference check)") {
    for (double r : {0.05, 0.2, 0.6}) {
      for (double t : {0.03, 0.1}) {
        const double ht = 1e-6;
        const double du_dt = (std::exp(2.0 * cigar_flow(r0, r, t + ht)) -
                              std::exp(2.0 * cigar_flow(r0, r, t - ht))) /
                             (2.0 * ht);
        const double hr = 1e-4 * std::max(r, 0.1);
        auto logu = [&](double rr) { return 2.0 * cigar_flow(r0, rr, t); };
        const double lap =
            (logu(r + hr) - 2.0 * logu(r) + logu(r - hr)) / (hr * hr) +
            (logu(r + hr) - logu(r - hr)) / (2.0 * hr * r);
        CHECK(du_dt == doctest::Approx(lap).epsilon(1e-6));
      }
    }
  }
  SUBCASE("origin value matches the explicit log expression") {
    for (double t : {0.01, 0.1, 0.7}) {
      const double big_l = -std::log(r0);
      const double expected =
          2.0 * std::log(r0) + std::log(big_l) + 4.0 * t * big_l * (big_l - 1.0);
      CHECK(-2.0 * cigar_flow(r0, 0.0, t) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("no overflow for tiny caps at late times") {
    CHECK(std::isfinite(cigar_flow(std::exp(-30.0), 0.0, 1.0)));
  }
}

TEST_CASE("origin_lower_bound") {
  CHECK_THROWS_AS(origin_lower_bound(0.0), std::domain_error);
  CHECK_THROWS_AS(origin_lower_bound(0.25), std::domain_error);
  const auto b = origin_lower_bound(0.125);
  // oracle: maximise the exact cigar flows over the cap radius
  auto val = [](double log_r0) { return cigar_flow(std::exp(log_r0), 0.0, 0.125); };
  const double star = golden_max(val, std::log(1e-10), std::log(kInvE * (1 - 1e-12)));
  CHECK(std::exp(star) == doctest::Approx(b.r0_opt).epsilon(1e-6));
  CHECK(val(star) == doctest::Approx(b.v_bound).epsilon(1e-9));
  // frozen closed-form value 4 t e^{1/(4t)+1} = e^3/2 at t = 1/8
  CHECK(std::exp(2.0 * b.v_bound) == doctest::Approx(0.5 * std::exp(3.0)).epsilon(1e-13));
  // stationarity and concavity at the optimiser
  const double h = 1e-4;
  CHECK(val(std::log(b.r0_opt) + h) < val(std::log(b.r0_opt)) + 1e-12);
  CHECK(val(std::log(b.r0_opt) - h) < val(std::log(b.r0_opt)) + 1e-12);
}

TEST_CASE("sphere_tangency at the worked point") {
  // oracle: forward evaluation of the tangency system. With alpha = 1 and
  // r0 = e^-2 the system gives beta = 2e^2/3 and K0 = (L-1)(L+1) = 3.
  const double beta = 2.0 * std::exp(2.0) / 3.0;
  const auto s = sphere_tangency(1.0, beta);
  CHECK(s.r0 == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  CHECK(s.k0 == doctest::Approx(3.0).epsilon(1e-9));
  // tangency residuals against alpha^2 h
  const RadialProfile sph = RadialProfile::sphere(s.beta, s.k0);
  const RadialProfile cusp = RadialProfile::cusp(1.0);
  CHECK(eval_v(sph, s.r0) == doctest::Approx(eval_v(cusp, s.r0)).epsilon(1e-10));
  CHECK(eval_dv(sph, s.r0) == doctest::Approx(eval_dv(cusp, s.r0)).epsilon(1e-9));
}

TEST_CASE("sphere_tangency domain and asymptotics") {
  CHECK_THROWS_AS(sphere_tangency(1.05, 1.05 * kE), std::domain_error);
  CHECK_THROWS_AS(sphere_tangency(1.05, 1.0), std::domain_error);
  const auto near = sphere_tangency(1.05, 1.05 * kE * (1.0 + 1e-6));
  CHECK(near.k0 == doctest::Approx(0.0).epsilon(1e-4));
  CHECK(std::abs(near.r0 - kInvE) <= 1e-4);
}

TEST_CASE("sphere family: monotone maps and the K0 floor") {
  const double alpha = 1.05;
  double prev_k0 = -1.0, prev_r0 = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double beta = alpha * kE * std::exp(0.12 * (i + 1));
    const auto s = sphere_tangency(alpha, beta);
    CHECK(s.k0 > prev_k0);
    CHECK(s.r0 < prev_r0);
    prev_k0 = s.k0;
    prev_r0 = s.r0;
    const double lb = std::log(beta / (2.0 * alpha));
    CHECK(s.k0 >= (lb * lb - 1.0) / (alpha * alpha) - 1e-12);
  }
}

TEST_CASE("curvature witness on a constant-curvature field") {
  const double alpha = 1.05;
  const auto truth = sphere_tangency(alpha, 12.0);
  const RadialGrid grid = RadialGrid::geometric(512, 1e-5, 0.9);
  Eigen::ArrayXd v(grid.size());
  const RadialProfile sph = RadialProfile::sphere(truth.beta, truth.k0);
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = eval_v(sph, grid.node(i));
  const RadialProfile field = RadialProfile::sampled(grid, v);

  const double t = 0.1;  // v(0) = log 12 = 2.48 >= mu/t = 1.2
  const auto w = curvature_witness(field, t, alpha, 0.12);
  CHECK(w.k0 == doctest::Approx(truth.k0).epsilon(1e-3));
  CHECK(std::log(w.beta) >= v[0] - 1e-9);
  CHECK(w.r1 < sphere_tangency(alpha, w.beta).r0);
}

TEST_CASE("curvature witness is sound on a capped cusp") {
  const double r0 = std::exp(-8.0);
  const RadialGrid grid = RadialGrid::geometric(1024, r0 / 32.0, 0.9);
  const RadialProfile cc = capped_cusp_profile(r0);
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = eval_v(cc, grid.node(i));
  const RadialProfile field = RadialProfile::sampled(grid, v);

  const double t = 0.02;  // v(0) = 6.96 >= mu/t = 6
  const auto w = curvature_witness(field, t, 1.05, 0.12);
  const double max_k = curvature_field(grid, v).maxCoeff();
  CHECK(w.k0 > 0.0);
  CHECK(w.k0 <= max_k * 1.01 + 1e-9);  // oracle: direct grid curvature maximum
  CHECK(std::log(w.beta) >= v[0] - 1e-9);
}

TEST_CASE("curvature witness rejects bad inputs") {
  const RadialGrid grid = RadialGrid::uniform(64, 0.9);
  // a field above alpha^2 h near its minimum: flat u = 200 > alpha^2 e^2
  const RadialProfile big = RadialProfile::constant(200.0, grid);
  CHECK_THROWS_AS(curvature_witness(big, 0.1, 1.05, 0.12), PreconditionError);
  // v(0) below mu/t
  const RadialProfile low = RadialProfile::constant(std::exp(0.2), grid);  // v = 0.1
  CHECK_THROWS_AS(curvature_witness(low, 0.001, 1.05, 0.12), PreconditionError);
  // flat u = e^2 sits under every barrier of the family: no touching beta
  const RadialProfile flat = RadialProfile::constant(std::exp(2.0), grid);
  CHECK_THROWS_AS(curvature_witness(flat, 0.5, 1.05, 0.12), SearchFailure);
}
