#pragma once

#include <span>

namespace wplab {

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

/// Throws FitError with fewer than two points or a degenerate abscissa.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Fit of log2(value) against log2(eps); the slope is the convergence order.
/// Non-positive values are rejected with FitError.
LinearFit order_fit(std::span<const double> eps, std::span<const double> value);

}  // namespace wplab
