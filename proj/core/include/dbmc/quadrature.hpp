#pragma once

#include <functional>

namespace dbmc {

struct QuadratureOptions {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 0.0;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double estimated_error = 0.0;
  int intervals = 0;
};

// Globally adaptive 7/15-point Gauss-Kronrod quadrature over [a, b]. The
// rule only samples interior points, so integrable endpoint singularities
// are never evaluated. The interval with the largest error estimate is
// bisected until the summed estimate meets
// max(absolute_tolerance, relative_tolerance * |value|).
//
// Throws ConvergenceError when max_intervals is exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& options = {});

}  // namespace dbmc
