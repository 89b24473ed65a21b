#include "ulheat/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulheat/error.hpp"

namespace ulheat {

SampledField::SampledField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) fail("field value count does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v)) fail("field values must be finite");
}

SampledField::SampledField(Grid grid, double value)
    : SampledField(grid, std::vector<double>(grid.size(), value)) {}

double SampledField::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SampledField::lr_norm(double r) const {
  if (std::isinf(r)) return sup_norm();
  if (!(r >= 1.0)) fail("L^r norm needs r >= 1");
  long double acc = 0.0L;
  for (std::size_t k = 0; k < values_.size(); ++k)
    acc += grid_.trapezoid_weight(k) * std::pow(std::abs(values_[k]), r);
  return std::pow(static_cast<double>(acc), 1.0 / r);
}

double SampledField::mass() const noexcept {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < values_.size(); ++k) acc += grid_.trapezoid_weight(k) * values_[k];
  return static_cast<double>(acc);
}

SampledField SampledField::scaled(double c) const {
  std::vector<double> out(values_);
  for (double& v : out) v *= c;
  return SampledField(grid_, std::move(out));
}

}  // namespace ulheat
