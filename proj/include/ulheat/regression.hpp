#pragma once

#include <cstddef>
#include <span>

namespace ulheat {

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  double x_mean = 0.0;
  double y_mean = 0.0;

  /// x where the fitted line crosses zero.
  double zero_crossing() const { return x_mean - y_mean / slope; }
};

/// Needs at least two points with distinct x. slope_stderr is 0 for n = 2.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace ulheat
