#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ulheat/field.hpp"

namespace ulheat {

enum class ProfileKind { Constant, PowerDecay, BoundedPower, Gaussian, Custom };

/// Initial data phi = lambda * psi.
///   Constant:      psi = 1
///   PowerDecay:    psi = |x|^-beta on Omega(0, delta), 0 outside
///   BoundedPower:  psi = (1 + |x|)^-beta
///   Gaussian:      psi = exp(-|x|^2 / width^2)
///   Custom:        node values given verbatim (lambda multiplies them)
/// |x| is measured from Domain::origin().
struct InitialData {
  ProfileKind kind = ProfileKind::Constant;
  double lambda = 1.0;
  double beta = 0.0;
  double delta = 1.0;
  double width = 1.0;
  std::vector<double> custom;

  static InitialData constant(double lambda);
  static InitialData power_decay(double lambda, double beta, double delta);
  static InitialData bounded_power(double lambda, double beta);
  static InitialData gaussian(double lambda, double width);
  static InitialData custom_values(std::vector<double> values);

  /// psi (lambda = 1) at distance `radius` from the origin. Not defined at
  /// radius 0 for singular PowerDecay.
  double shape(double radius) const;
  /// Extent of the support of psi; infinity when not compactly supported.
  double support_radius() const noexcept;
  /// Validates parameters; throws on violation.
  void validate() const;

  std::string name() const;
};

enum class Sampling {
  Nodewise,     // psi(x_i), singular origin node replaced by its ball average
  CellAverage,  // mean of psi over the dual cell of each node (1D analytic)
};

SampledField sample_initial(const InitialData& data, const Grid& grid,
                            Sampling sampling = Sampling::Nodewise);

}  // namespace ulheat
