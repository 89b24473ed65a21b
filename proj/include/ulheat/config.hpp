#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ulheat/calibration.hpp"
#include "ulheat/experiments.hpp"
#include "ulheat/initial_data.hpp"
#include "ulheat/solver.hpp"

namespace ulheat {

/// One initial-value problem: domain, grid, data and solver settings.
struct ProblemConfig {
  Domain domain = Domain::half_line(10.0);
  double h = 0.01;
  InitialData u0;
  Sampling sampling = Sampling::Nodewise;
  SolverConfig solver;
  double horizon = 1.0;

  Grid grid() const { return Grid(domain, h); }
  SampledField initial_field() const { return sample_initial(u0, grid(), sampling); }
};

struct ScalingConfig {
  std::vector<double> mu{0.5, 2.0};
};

struct CompareConfig {
  InitialData lower;
  InitialData upper;
};

struct UlnormConfig {
  std::vector<UlocParams> norms;
  /// Holder exponent q for the embedding check, if requested.
  std::optional<double> holder_q;
  bool covering = false;
  /// Smallness gate: r, rho from `gate_r`, `gate_rho`; gamma fixed or calibrated.
  bool gate = false;
  double gate_r = 2.0;
  double gate_rho = 1.0;
  std::optional<double> gamma;
  GateCalibrationSpec calibration;
};

struct RateConfig {
  std::vector<double> r{kInfinity};
  RateWindow window;
};

struct DecayConfig {
  double flat_tolerance = 0.05;
  /// Calibrate gamma for ||u0||_{L^{N(p-1)}} by bisection on the shape of u0.
  bool calibrate = false;
  double margin = 0.5;
  double calibration_horizon = 0.0;  // 0 means the run horizon
};

/// Everything a config file may describe. Sections not present stay unset.
struct ConfigBundle {
  std::optional<ProblemConfig> problem;
  std::optional<ExperimentSpec> sweep;
  ScalingConfig scaling;
  std::optional<CompareConfig> compare;
  UlnormConfig ulnorm;
  RateConfig rate;
  DecayConfig decay;
  /// Normalized document with every default filled in.
  nlohmann::json echo;
  std::optional<std::size_t> jobs;
};

/// Parses and validates a config document. Schema violations throw
/// ErrorKind::ConfigSchema naming the offending field path; parameter sets
/// outside the theorem ranges throw ErrorKind::HypothesisViolated.
ConfigBundle parse_config(const std::string& text);
ConfigBundle load_config(const std::string& path);

}  // namespace ulheat
