#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cuspflow {

inline constexpr double kInvE = 0.36787944117144233;  // e^{-1}
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Adaptive quadrature failed to reach the requested tolerance.
/// Carries the partial value and the error estimate at the point of failure.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double error)
      : std::runtime_error(what), value_(value), error_(error) {}
  double partial_value() const { return value_; }
  double error_estimate() const { return error_; }

 private:
  double value_;
  double error_;
};

/// Time step could not be completed above dt_min.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double t, double residual)
      : std::runtime_error(what), t_(t), residual_(residual) {}
  double time() const { return t_; }
  double residual() const { return residual_; }

 private:
  double t_;
  double residual_;
};

/// A bracketing or bisection search found no admissible solution.
class SearchFailure : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation's documented precondition does not hold for the given input.
class PreconditionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No time window in the trajectory satisfies the smallness hypothesis.
class WindowInfeasible : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// log(e^a + e^b) without overflow.
inline double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace cuspflow
