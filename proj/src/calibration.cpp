#include "ulheat/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ulheat/error.hpp"
#include "ulheat/experiments.hpp"
#include "ulheat/parallel.hpp"

namespace ulheat {

namespace {

SolverConfig quiet(const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.sample_stride = std::numeric_limits<std::size_t>::max();
  cfg.snapshot_stride = 0;
  cfg.uloc_probes.clear();
  cfg.lr_probes.clear();
  return cfg;
}

bool survives(const SampledField& shape, double a, const SolverConfig& cfg, double horizon) {
  return run(shape.scaled(a), cfg, horizon).report.status == RunStatus::GlobalByHorizon;
}

}  // namespace

double survival_threshold(const SampledField& shape, const SolverConfig& cfg, double horizon,
                          double rel_tol) {
  if (!(shape.sup_norm() > 0.0)) fail("survival_threshold: shape is identically zero");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) fail("survival_threshold: bad tolerance");
  const SolverConfig c = quiet(cfg);
  double lo = 0.0, hi = 1.0;
  if (survives(shape, hi, c, horizon)) {
    lo = hi;
    while (survives(shape, hi, c, horizon)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) fail(ErrorKind::Numerical, "survival_threshold: no blow-up below amplitude 1e6");
    }
  } else {
    while (!survives(shape, hi * 0.5, c, horizon)) {
      hi *= 0.5;
      if (hi < 1e-12) fail(ErrorKind::Numerical, "survival_threshold: blow-up at every amplitude");
    }
    lo = hi * 0.5;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (survives(shape, mid, c, horizon) ? lo : hi) = mid;
  }
  return lo;
}

Grid calibration_grid(const GateCalibrationSpec& spec) {
  const double length = spec.length_over_rho * spec.rho;
  const double h = spec.h_over_rho * spec.rho;
  const Domain d = spec.dimension == 1 ? Domain::half_line(length) : Domain::half_plane(length, 2.0 * length);
  return Grid(d, h);
}

std::vector<std::pair<std::string, SampledField>> calibration_family(const GateCalibrationSpec& spec) {
  const Grid grid = calibration_grid(spec);
  const double rho = spec.rho;
  std::vector<std::pair<std::string, SampledField>> out;
  out.emplace_back("constant", SampledField(grid, 1.0));
  for (double w : {0.125, 0.25, 0.5, 1.0, 2.0}) {
    const InitialData d = InitialData::power_decay(1.0, 0.0, w * rho);
    out.emplace_back(d.name() + "_" + std::to_string(w), sample_initial(d, grid, Sampling::CellAverage));
  }
  for (double w : {0.25, 0.5, 1.0}) {
    const InitialData d = InitialData::gaussian(1.0, w * rho);
    out.emplace_back(d.name() + "_" + std::to_string(w), sample_initial(d, grid, Sampling::CellAverage));
  }
  return out;
}

GateCalibration calibrate_gamma(const GateCalibrationSpec& spec) {
  if (!admissible_r(spec.p, spec.dimension, spec.r)) fail("calibrate_gamma: r is not admissible");
  if (!(spec.rho > 0.0 && spec.mu > 0.0)) fail("calibrate_gamma: rho and mu must be positive");
  if (!(spec.margin > 0.0 && spec.margin <= 1.0)) fail("calibrate_gamma: margin must lie in (0, 1]");
  const auto family = calibration_family(spec);
  SolverConfig cfg = spec.solver;
  cfg.p = spec.p;
  const double horizon = spec.mu * spec.rho * spec.rho;

  GateCalibration out;
  out.spec = spec;
  out.shapes.resize(family.size());
  parallel_for(family.size(), spec.jobs, [&](std::size_t k) {
    const auto& [name, shape] = family[k];
    const double a = survival_threshold(shape, cfg, horizon);
    const double g = smallness_gate(shape, spec.r, spec.rho, 0.0, spec.p, spec.dimension).lhs;
    out.shapes[k] = {name, a, a * g};
  });
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : out.shapes) best = std::min(best, s.gate_value);
  out.gamma = spec.margin * best;
  return out;
}

DecayCalibration calibrate_decay_gamma(const SampledField& shape, const SolverConfig& cfg,
                                       double horizon, double margin) {
  if (!(margin > 0.0 && margin <= 1.0)) fail("calibrate_decay_gamma: margin must lie in (0, 1]");
  const double q = shape.dimension() * (cfg.p - 1.0);
  if (!(q >= 1.0)) fail("calibrate_decay_gamma: needs N(p-1) >= 1");
  DecayCalibration out;
  out.margin = margin;
  out.threshold_amplitude = survival_threshold(shape, cfg, horizon);
  out.shape_norm = shape.lr_norm(q);
  out.gamma = margin * out.threshold_amplitude * out.shape_norm;
  return out;
}

}  // namespace ulheat
