#pragma once

#include <functional>

#include "cuspflow/common.hpp"

namespace cuspflow {

struct QuadResult {
  double value;
  double error;  // estimated absolute error
};

/// Adaptive Gauss-Kronrod (G7, K15) on [a, b]. Bisects the interval with
/// the largest error estimate until the total estimate meets
/// max(abs_tol, rel_tol * |value|); throws QuadratureError (carrying the
/// partial value and estimate) if the subdivision budget is exhausted.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int max_intervals = 4000);

}  // namespace cuspflow
