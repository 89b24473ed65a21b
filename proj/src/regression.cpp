#include "ulheat/regression.hpp"

#include <algorithm>
#include <cmath>

#include "ulheat/error.hpp"

namespace ulheat {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail("fit_line: x and y sizes differ");
  const std::size_t n = x.size();
  if (n < 2) fail("fit_line: need at least two points");

  // Centered sums keep the fit well conditioned when x is clustered far from 0.
  long double mx = 0.0L, my = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<long double>(n);
  my /= static_cast<long double>(n);
  long double sxx = 0.0L, sxy = 0.0L, syy = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const long double dx = x[k] - mx, dy = y[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0L) fail("fit_line: x values are all equal");

  LinearFit fit;
  fit.n = n;
  fit.x_mean = static_cast<double>(mx);
  fit.y_mean = static_cast<double>(my);
  const long double slope = sxy / sxx;
  fit.slope = static_cast<double>(slope);
  fit.intercept = static_cast<double>(my - slope * mx);
  const long double ss_res = std::max(0.0L, syy - slope * sxy);
  fit.r2 = syy > 0.0L ? static_cast<double>(1.0L - ss_res / syy) : 1.0;
  fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
  fit.slope_stderr = n > 2 ? static_cast<double>(std::sqrt(ss_res / (n - 2) / sxx)) : 0.0;
  return fit;
}

}  // namespace ulheat
