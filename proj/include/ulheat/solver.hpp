#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ulheat/field.hpp"
#include "ulheat/history.hpp"

namespace ulheat {

struct SolverConfig {
  /// Nonlinearity exponent; p = 1 is the linear oracle.
  double p = 2.0;
  /// Courant factor dt / h^2. Unset means 0.4 in 1D and 0.2 in 2D.
  std::optional<double> cfl;
  /// Sup-norm threshold treated as blow-up.
  double u_max = 1e8;
  /// Trailing samples used by the blow-up time extrapolation.
  std::size_t fit_window = 20;
  /// Record a history sample every this many steps.
  std::size_t sample_stride = 1;
  /// false replaces the flux condition by homogeneous Neumann on physical faces.
  bool flux_enabled = true;
  /// Uniformly local and global L^r norms recorded with every history sample.
  std::vector<UlocParams> uloc_probes;
  std::vector<double> lr_probes;
  /// Store the full field every this many steps (0 disables snapshots).
  std::size_t snapshot_stride = 0;

  double courant(int dimension) const;
  /// Stability limit 1/(2N) of the explicit scheme.
  static double max_courant(int dimension) { return dimension == 2 ? 0.25 : 0.5; }
  void validate(int dimension) const;
};

/// |u|^{p-1} u
double boundary_flux(double u, double p) noexcept;

/// Explicit Euler for u_t = Laplace(u) with ghost-node boundary closures:
/// physical faces use u_ghost = u_inner + 2h |u_b|^{p-1} u_b, artificial faces
/// reflect u_ghost = u_inner. Reads from one buffer and writes the other.
class ExplicitStepper {
 public:
  ExplicitStepper(const Grid& grid, const SolverConfig& config);

  /// cfl h^2, halved until dt p |u_b|^{p-1} / h < 1 on every physical boundary node.
  double controlled_dt(std::span<const double> u) const;
  double base_dt() const noexcept { return base_dt_; }

  /// Writes u + dt * L_h u into `out` and returns max |out|.
  double advance(std::span<const double> u, std::span<double> out, double dt) const;

  const Grid& grid() const noexcept { return grid_; }
  const SolverConfig& config() const noexcept { return config_; }

 private:
  double advance_1d(std::span<const double> u, std::span<double> out, double dt) const;
  double advance_2d(std::span<const double> u, std::span<double> out, double dt) const;
  double ghost_term(double boundary_value, FaceKind kind) const noexcept;

  Grid grid_;
  SolverConfig config_;
  double base_dt_;
  std::vector<std::size_t> flux_nodes_;
};

/// One controlled explicit step.
SampledField step(const SampledField& u, const SolverConfig& cfg);
/// One explicit step with the given dt (must satisfy the Courant limit).
SampledField step(const SampledField& u, const SolverConfig& cfg, double dt);

enum class RunStatus { BlownUp, GlobalByHorizon };

struct BlowupReport {
  RunStatus status = RunStatus::GlobalByHorizon;
  double t_hat = std::numeric_limits<double>::quiet_NaN();
  /// (start of the extrapolation window, first threshold crossing)
  std::array<double, 2> t_bracket{std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN()};
  double fit_r2 = std::numeric_limits<double>::quiet_NaN();
  /// Spread of zero crossings over sub-windows of the fit window.
  double t_hat_spread = std::numeric_limits<double>::quiet_NaN();
  double grid_h = 0.0;
  double t_end = 0.0;
  std::size_t steps = 0;
  /// false when the extrapolation failed and t_hat fell back to the crossing time.
  bool extrapolated = false;
  /// fit_r2 below 0.99: the rate ansatz is doubtful for this run.
  bool low_confidence = false;
};

struct Snapshot {
  double t;
  SampledField field;
};

struct RunResult {
  SupNormHistory history;
  BlowupReport report;
  std::vector<Snapshot> snapshots;
  SampledField final_state;
};

/// Integrates until the sup norm reaches u_max (blown up) or t reaches the
/// horizon. A threshold crossing on the last step wins over the horizon.
RunResult run(const SampledField& u0, const SolverConfig& cfg, double t_horizon);

struct BlowupFit {
  double t_hat = 0.0;
  double r2 = 0.0;
  double spread = 0.0;
  double window_start = 0.0;
};

/// Fits W = V^{-2(p-1)} linearly in t over the trailing `fit_window` samples
/// and returns the zero crossing. Throws "no blow-up trend" when V is not
/// strictly increasing there.
BlowupFit estimate_blowup_time(const SupNormHistory& history, double p, std::size_t fit_window);

/// Smooth bump phi(x, t) = B(|x - c| / a) B((t - t0) / tau),
/// B(s) = exp(1 - 1 / (1 - s^2)) on |s| < 1.
struct BumpTestFunction {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;
  double t0 = 0.5;
  double tau = 0.25;

  double value(double x, double y, double t) const noexcept;
  double dt(double x, double y, double t) const noexcept;
  std::array<double, 2> grad(double x, double y, double t) const noexcept;
};

/// |int int (-u phi_t + grad u . grad phi) - int int_{dOmega} |u|^{p-1} u phi|
/// by trapezoidal quadrature over the snapshots and the grid.
double weak_residual(std::span<const Snapshot> trajectory, const BumpTestFunction& test_fn,
                     double p, bool flux_enabled = true);

/// e^{t - x}: solves u_t = u_xx on the half-line with -u_x(0, t) = u(0, t).
double exact_linear_solution(double x, double t) noexcept;

}  // namespace ulheat
