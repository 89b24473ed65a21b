#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ulheat/initial_data.hpp"
#include "ulheat/solver.hpp"

namespace ulheat {

/// Largest amplitude a (to relative precision `rel_tol`) such that a * shape
/// survives to `horizon`. Throws when even tiny amplitudes blow up or no
/// amplitude up to 1e6 does.
double survival_threshold(const SampledField& shape, const SolverConfig& cfg, double horizon,
                          double rel_tol = 1e-3);

struct ShapeThreshold {
  std::string name;
  /// Survival threshold amplitude.
  double amplitude = 0.0;
  /// Gate value of amplitude * shape.
  double gate_value = 0.0;
};

struct GateCalibrationSpec {
  double p = 2.0;
  int dimension = 1;
  double r = 2.0;
  double rho = 1.0;
  /// Existence time checked is mu rho^2.
  double mu = 0.1;
  /// gamma = margin * min over the family of the gate value at threshold.
  double margin = 0.5;
  /// Grid spacing in units of rho.
  double h_over_rho = 1.0 / 64.0;
  /// Half-line (or half-plane) truncation in units of rho.
  double length_over_rho = 8.0;
  SolverConfig solver;
  std::size_t jobs = 1;
};

struct GateCalibration {
  double gamma = 0.0;
  GateCalibrationSpec spec;
  std::vector<ShapeThreshold> shapes;
};

/// Domain and grid shared by the calibration runs.
Grid calibration_grid(const GateCalibrationSpec& spec);

/// Calibration family: constant data, boundary plateaus of width rho/8 to
/// 2 rho and Gaussian boundary bumps of width rho/4 to rho. Constant data
/// alone overestimates gamma since boundary-localized data with the same
/// uniformly local norm blow up sooner.
std::vector<std::pair<std::string, SampledField>> calibration_family(const GateCalibrationSpec& spec);

GateCalibration calibrate_gamma(const GateCalibrationSpec& spec);

struct DecayCalibration {
  /// gamma = margin * ||a* shape||_{L^{N(p-1)}} at the survival threshold a*.
  double gamma = 0.0;
  double threshold_amplitude = 0.0;
  double shape_norm = 0.0;
  double margin = 0.5;
};

/// Threshold of `shape` for survival to `horizon`, expressed in the
/// L^{N(p-1)} norm of the data.
DecayCalibration calibrate_decay_gamma(const SampledField& shape, const SolverConfig& cfg,
                                       double horizon, double margin = 0.5);

}  // namespace ulheat
