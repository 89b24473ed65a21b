#pragma once

#include <span>
#include <vector>

#include "ulheat/domain_grid.hpp"

namespace ulheat {

/// Node values of u(., t) or of initial data on a grid. Values are finite by
/// construction.
class SampledField {
 public:
  SampledField(Grid grid, std::vector<double> values);
  /// Constant field.
  SampledField(Grid grid, double value);

  const Grid& grid() const noexcept { return grid_; }
  double h() const noexcept { return grid_.h(); }
  int dimension() const noexcept { return grid_.dimension(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double sup_norm() const noexcept;
  /// Global L^r(Omega) norm by trapezoidal quadrature; r = infinity gives sup_norm.
  double lr_norm(double r) const;
  /// Trapezoidal integral of u over the truncated domain.
  double mass() const noexcept;

  /// c * f, nodewise.
  SampledField scaled(double c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace ulheat
