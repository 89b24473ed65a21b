#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ulheat/initial_data.hpp"
#include "ulheat/solver.hpp"

namespace ulheat {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// 1 + 1/N
double critical_exponent(int dimension);

/// Exponents r for which the uniformly local smallness condition controls
/// existence: r >= N(p-1) above the critical exponent, r > 1 at it, r >= 1
/// below it. r = infinity is always admissible.
bool admissible_r(double p, int dimension, double r);

/// Same ranges, used as the lower-rate floor for rate_check.
bool rate_admissible_r(double p, int dimension, double r);

struct GateResult {
  double lhs = 0.0;
  bool pass = false;
};

/// lhs = rho^{1/(p-1) - N/r} ||phi||_{r,rho}, pass = lhs <= gamma.
GateResult smallness_gate(const SampledField& phi, double r, double rho, double gamma, double p,
                          int dimension);

enum class Regime { LargeLambdaR, LargeLambdaBeta, SmallLambda };

struct PredictedExponent {
  double exponent = 0.0;
  /// Regress against log(lambda |log lambda|) instead of log lambda.
  bool log_correction = false;
};

/// Slope of log T(lambda psi) against log lambda. Throws HypothesisViolated
/// ("theorem hypothesis violated") outside the stated parameter ranges.
PredictedExponent predicted_exponent(double p, int dimension, double beta, Regime regime,
                                     double r = kInfinity);

enum class ExperimentKind {
  LambdaSweepLarge,
  LambdaSweepSmall,
  ScalingCheck,
  Comparison,
  RateCheck,
  DecayCheck,
};

std::string to_string(ExperimentKind kind);
std::string to_string(Regime regime);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::LambdaSweepLarge;
  double p = 2.0;
  int dimension = 1;
  double beta = 0.0;
  double r = kInfinity;
  /// Defaults to LargeLambdaBeta / SmallLambda by kind.
  std::optional<Regime> regime;
  std::vector<double> lambda_grid;
  /// psi; its lambda is ignored.
  InitialData profile;

  /// Grid spacing and truncation length at the reference lambda (geometric
  /// centre of the grid). Unset means calibrate from a pilot run.
  std::optional<double> grid_h;
  std::optional<double> truncation;
  /// Pilot calibration: nodes per diffusion length sqrt(T) and domain length
  /// in units of sqrt(T) beyond the support of psi.
  double nodes_per_diffusion_length = 40.0;
  double truncation_factor = 10.0;
  /// Per-point horizon in units of the predicted T.
  double horizon_factor = 50.0;

  /// Relative tolerance on the slope against the expected exponent.
  double tolerance = 0.15;
  /// Optional absolute tolerance (takes precedence).
  std::optional<double> absolute_tolerance;

  SolverConfig solver;
  std::size_t jobs = 1;

  Regime effective_regime() const;
  /// Validates the grid and the parameter ranges.
  void validate() const;
};

struct SweepPoint {
  double lambda = 0.0;
  double t_hat = std::numeric_limits<double>::quiet_NaN();
  double t_err = std::numeric_limits<double>::quiet_NaN();
  double h = 0.0;
  double length = 0.0;
  double fit_r2 = std::numeric_limits<double>::quiet_NaN();
  /// "blown_up", "global_by_horizon" or a failure reason.
  std::string status;
  /// Inside the fitted asymptotic window.
  bool used = false;
};

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_ = 0.0;
  /// Fit against log lambda in the same window, for comparison with the
  /// log-corrected regression.
  double uncorrected_slope = 0.0;
  double uncorrected_stderr = 0.0;
  double expected_exponent = 0.0;
  bool log_correction_applied = false;
  bool widened = false;
  bool pass = false;
  double reference_lambda = 0.0;
  double reference_h = 0.0;
  double reference_length = 0.0;
  double reference_time = 0.0;
  /// Doubling test at the reference lambda: relative T_hat change with 2x truncation.
  double truncation_change = 0.0;
  bool truncation_ok = false;
  /// Sorted by lambda; one entry per lambda actually run.
  std::vector<SweepPoint> points;
};

/// Runs the solver for every lambda and regresses log T_hat on the asymptotic
/// end (top or bottom 1.5 decades) of the grid. Grids follow the predicted
/// law: h and the diffusion part of the truncation scale with T^{1/2}, the
/// horizon with T. Throws "sweep underpowered" with fewer than 4 usable points.
ExponentFit lambda_sweep(const ExperimentSpec& spec);

/// x axis of the regression: log lambda, or log(lambda |log lambda|).
double sweep_abscissa(double lambda, bool log_correction);

struct ScalingResult {
  double ratio = 0.0;
  BlowupReport base;
  BlowupReport scaled;
};

/// mu^2 T_hat_mu / T_hat, where T_hat_mu comes from the data
/// mu^{1/(p-1)} phi(mu x) on the grid h/mu over the domain scaled by 1/mu.
ScalingResult scaling_check(const SampledField& phi, double mu, const SolverConfig& cfg,
                            double horizon);

/// Field mu^{1/(p-1)} phi(mu x) on the grid h/mu.
SampledField rescale_data(const SampledField& phi, double mu, double p);

struct ComparisonResult {
  /// max over steps and nodes of u1 - u2
  double max_violation = 0.0;
  /// max over steps of (u1 - u2)_+ / ||u2||_inf
  double max_relative_violation = 0.0;
  std::size_t steps = 0;
  double t_end = 0.0;
  /// Stopped because one of the runs reached u_max.
  bool reached_threshold = false;
};

/// Advances both data in lockstep with a common dt and tracks u1 - u2.
ComparisonResult comparison_test(const SampledField& phi1, const SampledField& phi2,
                                 const SolverConfig& cfg, double horizon);

struct RateWindow {
  /// T_hat - t ranges over [lo * T_hat, hi * T_hat].
  double lo = 0.01;
  double hi = 0.1;
};

struct RateResult {
  double inf_val = 0.0;
  double sup_val = 0.0;
  double exponent = 0.0;
  std::size_t samples = 0;
};

/// min and max of (T_hat - t)^{1/(2(p-1)) - N/(2r)} ||u(t)||_{L^r} over the
/// window. r = infinity uses the sup norm; finite r needs an L^r column.
RateResult rate_check(const SupNormHistory& history, double t_hat, double p, int dimension,
                      double r, RateWindow window = {});

struct DecayResult {
  double sup_val = 0.0;
  /// d log(t^{1/(2(p-1))} ||u||_inf) / d log t over the last decade.
  double tail_slope = 0.0;
  bool non_increasing = false;
};

/// Throws when the run blew up. `flat_tolerance` bounds the tail slope
/// accepted as a non-increasing trend.
DecayResult decay_check(const SupNormHistory& history, const BlowupReport& report, double p,
                        double flat_tolerance = 0.05);

struct TruncationCheck {
  double t_hat = 0.0;
  double t_hat_doubled = 0.0;
  /// |T_hat(2L) - T_hat(L)| / T_hat(L); infinite when only one run blew up.
  double relative_change = 0.0;
  bool pass = false;
};

/// Reruns `data` on the domain with every length doubled and compares T_hat.
/// Untruncated domains pass trivially; two global runs count as agreement.
TruncationCheck truncation_doubling_check(const InitialData& data, const Domain& domain, double h,
                                          Sampling sampling, const SolverConfig& cfg, double horizon,
                                          double tolerance = 0.005);

struct SandwichBand {
  double slope = 0.0;
  /// Extremes of log T_hat - slope * log lambda over the window.
  double offset_min = 0.0;
  double offset_max = 0.0;
  std::size_t points = 0;

  double width() const noexcept { return offset_max - offset_min; }
};

/// Band between the two lines of the given slope that enclose log T_hat over
/// the top `decades` of the sweep.
SandwichBand sandwich_band(const ExponentFit& fit, double slope, double decades = 1.0);

}  // namespace ulheat
