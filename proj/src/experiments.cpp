#include "ulheat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "ulheat/error.hpp"
#include "ulheat/parallel.hpp"
#include "ulheat/regression.hpp"
#include "ulheat/uloc_norms.hpp"

namespace ulheat {

namespace {

constexpr double kEq = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kEq * std::max(1.0, std::abs(b)); }

void check_dimension(int dimension) {
  if (dimension != 1 && dimension != 2) fail("dimension must be 1 or 2");
}

[[noreturn]] void hypothesis(const std::string& detail) {
  fail(ErrorKind::HypothesisViolated, "theorem hypothesis violated: " + detail);
}

}  // namespace

std::size_t resolve_jobs(std::optional<std::size_t> requested) {
  if (const char* env = std::getenv("ULHEAT_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return requested.value_or(1) == 0 ? 1 : requested.value_or(1);
}

double critical_exponent(int dimension) {
  check_dimension(dimension);
  return 1.0 + 1.0 / dimension;
}

bool admissible_r(double p, int dimension, double r) {
  if (!(p > 1.0)) fail("admissible_r needs p > 1");
  const double ps = critical_exponent(dimension);
  if (std::isnan(r)) return false;
  if (std::isinf(r)) return r > 0;
  if (near(p, ps)) return r > 1.0 && !near(r, 1.0);
  if (p > ps) return r >= dimension * (p - 1.0) || near(r, dimension * (p - 1.0));
  return r >= 1.0;
}

bool rate_admissible_r(double p, int dimension, double r) { return admissible_r(p, dimension, r); }

GateResult smallness_gate(const SampledField& phi, double r, double rho, double gamma, double p,
                          int dimension) {
  if (phi.dimension() != dimension) fail("smallness_gate: field dimension does not match N");
  if (!admissible_r(p, dimension, r)) fail("smallness_gate: r is not admissible for this p");
  if (!(rho > 0.0)) fail("smallness_gate: rho must be positive");
  const double scale_exp = 1.0 / (p - 1.0) - (std::isinf(r) ? 0.0 : dimension / r);
  const double lhs = std::pow(rho, scale_exp) * uloc_norm(phi, {r, rho});
  return {lhs, lhs <= gamma};
}

PredictedExponent predicted_exponent(double p, int dimension, double beta, Regime regime,
                                     double r) {
  check_dimension(dimension);
  if (!(p > 1.0)) hypothesis("p must exceed 1");
  const double ps = critical_exponent(dimension);
  const double n = dimension;
  const bool subcritical = p < ps && !near(p, ps);

  switch (regime) {
    case Regime::LargeLambdaR: {
      if (std::isinf(r)) return {-2.0 * (p - 1.0), false};
      const bool ok = subcritical ? r >= 1.0 : r > n * (p - 1.0) && !near(r, n * (p - 1.0));
      if (!ok) hypothesis("r outside the admissible range for large lambda");
      return {-2.0 * r * (p - 1.0) / (r - n * (p - 1.0)), false};
    }
    case Regime::LargeLambdaBeta: {
      if (!(beta >= 0.0)) hypothesis("beta must be nonnegative");
      const double cap = subcritical ? n : 1.0 / (p - 1.0);
      if (!(beta < cap) || near(beta, cap))
        hypothesis(subcritical ? "need beta < N when p < 1 + 1/N"
                               : "need beta < 1/(p-1) when p >= 1 + 1/N");
      return {-2.0 * (p - 1.0) / (1.0 - beta * (p - 1.0)), false};
    }
    case Regime::SmallLambda: {
      if (!(beta >= 0.0)) hypothesis("beta must be nonnegative");
      if (!subcritical) {
        const double cap = 1.0 / (p - 1.0);
        if (!(beta < cap) || near(beta, cap)) hypothesis("need beta < 1/(p-1) when p >= 1 + 1/N");
        return {-2.0 * (p - 1.0) / (1.0 - beta * (p - 1.0)), false};
      }
      if (near(beta, n)) return {-2.0 * (p - 1.0) / (1.0 - n * (p - 1.0)), true};
      if (beta < n) return {-2.0 * (p - 1.0) / (1.0 - beta * (p - 1.0)), false};
      return {-2.0 * (p - 1.0) / (1.0 - n * (p - 1.0)), false};
    }
  }
  fail("unknown regime");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::LambdaSweepLarge: return "lambda_sweep_large";
    case ExperimentKind::LambdaSweepSmall: return "lambda_sweep_small";
    case ExperimentKind::ScalingCheck: return "scaling_check";
    case ExperimentKind::Comparison: return "comparison";
    case ExperimentKind::RateCheck: return "rate_check";
    case ExperimentKind::DecayCheck: return "decay_check";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::LargeLambdaR: return "large_lambda_r";
    case Regime::LargeLambdaBeta: return "large_lambda_beta";
    case Regime::SmallLambda: return "small_lambda";
  }
  return "unknown";
}

Regime ExperimentSpec::effective_regime() const {
  if (regime) return *regime;
  return kind == ExperimentKind::LambdaSweepSmall ? Regime::SmallLambda : Regime::LargeLambdaBeta;
}

void ExperimentSpec::validate() const {
  check_dimension(dimension);
  if (kind != ExperimentKind::LambdaSweepLarge && kind != ExperimentKind::LambdaSweepSmall)
    fail("lambda_sweep needs a sweep experiment kind");
  if (lambda_grid.size() < 4) fail(ErrorKind::Numerical, "sweep underpowered: lambda grid has fewer than 4 points");
  for (double l : lambda_grid)
    if (!(l > 0.0) || !std::isfinite(l)) fail("lambda grid values must be positive");
  profile.validate();
  SolverConfig cfg = solver;
  cfg.p = p;
  cfg.validate(dimension);
  if (!(nodes_per_diffusion_length >= 4.0)) fail("nodes_per_diffusion_length must be at least 4");
  if (!(truncation_factor > 0.0)) fail("truncation_factor must be positive");
  if (!(horizon_factor > 1.0)) fail("horizon_factor must exceed 1");
  if (grid_h.has_value() != truncation.has_value()) fail("grid_h and truncation must be given together");
  if (grid_h && !(*grid_h > 0.0 && *truncation > *grid_h)) fail("grid_h and truncation must be positive");
  if (!(tolerance > 0.0)) fail("tolerance must be positive");
  predicted_exponent(p, dimension, beta, effective_regime(), r);
}

double sweep_abscissa(double lambda, bool log_correction) {
  if (!log_correction) return std::log(lambda);
  const double a = lambda * std::abs(std::log(lambda));
  if (!(a > 0.0)) fail("log-corrected abscissa needs lambda != 1");
  return std::log(a);
}

namespace {

struct SweepGrid {
  double h;
  double length;
};

double support_extent(const InitialData& psi) {
  const double s = psi.support_radius();
  return std::isfinite(s) ? s : 0.0;
}

Domain sweep_domain(int dimension, double length) {
  return dimension == 1 ? Domain::half_line(length) : Domain::half_plane(length, 2.0 * length);
}

// Snaps the length to a whole number of cells.
SweepGrid make_grid(double h, double length) {
  const double cells = std::max(8.0, std::ceil(length / h - 1e-9));
  return {h, cells * h};
}

SolverConfig sweep_solver(const ExperimentSpec& spec) {
  SolverConfig cfg = spec.solver;
  cfg.p = spec.p;
  cfg.sample_stride = 1;
  cfg.snapshot_stride = 0;
  cfg.uloc_probes.clear();
  cfg.lr_probes.clear();
  return cfg;
}

BlowupReport run_point(const ExperimentSpec& spec, double lambda, const SweepGrid& g, double horizon) {
  const Grid grid(sweep_domain(spec.dimension, g.length), g.h);
  InitialData data = spec.profile;
  data.lambda = lambda;
  const SampledField u0 = sample_initial(data, grid, Sampling::CellAverage);
  return run(u0, sweep_solver(spec), horizon).report;
}

constexpr std::size_t kMaxPilotNodes = 400000;

// Pilot runs at lambda_ref until the grid matches the measured blow-up time.
struct Reference {
  double time;
  SweepGrid grid;
};

Reference calibrate_reference(const ExperimentSpec& spec, double lambda_ref) {
  const double support = support_extent(spec.profile);
  double guess = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double root = std::sqrt(guess);
    const double h = root / spec.nodes_per_diffusion_length;
    const SweepGrid g = make_grid(h, spec.truncation_factor * root + support);
    if (g.length / g.h > kMaxPilotNodes) fail(ErrorKind::Numerical, "pilot grid too large");
    const BlowupReport rep = run_point(spec, lambda_ref, g, 20.0 * guess);
    if (rep.status == RunStatus::GlobalByHorizon) {
      guess *= 20.0;
      continue;
    }
    const double t = rep.t_hat;
    if (!(t > 0.0)) fail(ErrorKind::Numerical, "pilot run blew up at t = 0");
    if (t > guess / 3.0 && t < 3.0 * guess) return {t, g};
    guess = t;
  }
  fail(ErrorKind::Numerical, "pilot calibration did not converge");
}

std::string status_name(const BlowupReport& rep) {
  if (rep.status == RunStatus::GlobalByHorizon) return "global_by_horizon";
  return rep.extrapolated ? "blown_up" : "blown_up_unextrapolated";
}

struct WindowFit {
  LinearFit fit;
  LinearFit plain;
  std::size_t used = 0;
};

}  // namespace

ExponentFit lambda_sweep(const ExperimentSpec& spec) {
  spec.validate();
  const Regime regime = spec.effective_regime();
  const PredictedExponent pred = predicted_exponent(spec.p, spec.dimension, spec.beta, regime, spec.r);
  const bool large = regime != Regime::SmallLambda;
  const bool logc = pred.log_correction;

  std::vector<double> lambdas = spec.lambda_grid;
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  if (lambdas.size() < 4) fail(ErrorKind::Numerical, "sweep underpowered: fewer than 4 distinct lambda values");
  if (logc)
    for (double l : lambdas)
      if (!(l < 1.0)) fail("log-corrected sweep needs lambda < 1");

  const double lambda_ref = std::exp(0.5 * (std::log(lambdas.front()) + std::log(lambdas.back())));
  const double support = support_extent(spec.profile);

  ExponentFit out;
  out.expected_exponent = pred.exponent;
  out.log_correction_applied = logc;
  out.reference_lambda = lambda_ref;

  double diffusion_length_ref = 0.0;
  if (spec.grid_h) {
    out.reference_h = *spec.grid_h;
    out.reference_length = *spec.truncation;
    diffusion_length_ref = std::max(*spec.truncation - support, 0.0);
    out.reference_time = std::pow(*spec.grid_h * spec.nodes_per_diffusion_length, 2);
  } else {
    const Reference ref = calibrate_reference(spec, lambda_ref);
    out.reference_time = ref.time;
    out.reference_h = std::sqrt(ref.time) / spec.nodes_per_diffusion_length;
    diffusion_length_ref = spec.truncation_factor * std::sqrt(ref.time);
    out.reference_length = diffusion_length_ref + support;
  }

  {
    const SweepGrid g = make_grid(out.reference_h, out.reference_length);
    InitialData data = spec.profile;
    data.lambda = lambda_ref;
    const TruncationCheck tc =
        truncation_doubling_check(data, sweep_domain(spec.dimension, g.length), g.h, Sampling::CellAverage,
                                  sweep_solver(spec), spec.horizon_factor * out.reference_time);
    out.truncation_change = tc.relative_change;
    out.truncation_ok = tc.pass;
  }

  const double x_ref = sweep_abscissa(lambda_ref, logc);
  auto run_set = [&](const std::vector<double>& set) {
    std::vector<SweepPoint> pts(set.size());
    parallel_for(set.size(), spec.jobs, [&](std::size_t k) {
      const double lambda = set[k];
      // T ~ exp(slope * x), so length scales ~ exp(slope * (x - x_ref) / 2).
      const double s = std::exp(0.5 * pred.exponent * (sweep_abscissa(lambda, logc) - x_ref));
      const SweepGrid g = make_grid(out.reference_h * s, diffusion_length_ref * s + support);
      SweepPoint pt;
      pt.lambda = lambda;
      pt.h = g.h;
      pt.length = g.length;
      const double horizon = spec.horizon_factor * out.reference_time * s * s;
      try {
        const BlowupReport rep = run_point(spec, lambda, g, horizon);
        pt.status = status_name(rep);
        if (rep.status == RunStatus::BlownUp) {
          pt.t_hat = rep.t_hat;
          pt.t_err = rep.t_hat_spread;
          pt.fit_r2 = rep.fit_r2;
        }
      } catch (const Error& e) {
        pt.status = std::string("failed: ") + e.what();
      }
      pts[k] = pt;
    });
    return pts;
  };

  std::vector<SweepPoint> points = run_set(lambdas);

  auto fit_window = [&](std::vector<SweepPoint>& pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    const double edge = large ? pts.back().lambda : pts.front().lambda;
    const double span = std::pow(10.0, 1.5);
    std::vector<double> x, xp, y;
    for (auto& pt : pts) {
      const bool inside = large ? pt.lambda >= edge / span * (1 - 1e-9) : pt.lambda <= edge * span * (1 + 1e-9);
      pt.used = inside && pt.status == "blown_up" && pt.t_hat > 0.0;
      if (!pt.used) continue;
      x.push_back(sweep_abscissa(pt.lambda, logc));
      xp.push_back(std::log(pt.lambda));
      y.push_back(std::log(pt.t_hat));
    }
    if (y.size() < 4) {
      std::ostringstream msg;
      msg << "sweep underpowered: " << y.size() << " usable points in the asymptotic window";
      fail(ErrorKind::Numerical, msg.str());
    }
    return WindowFit{fit_line(x, y), fit_line(xp, y), y.size()};
  };

  WindowFit wf = fit_window(points);
  if (!(wf.fit.slope_stderr < 0.1 * std::abs(wf.fit.slope))) {
    // Extend half a decade further into the asymptotic regime with the grid's ratio.
    const double ratio = std::exp((std::log(lambdas.back()) - std::log(lambdas.front())) / (lambdas.size() - 1));
    const int extra = std::max(1, static_cast<int>(std::ceil(0.5 * std::log(10.0) / std::log(ratio))));
    std::vector<double> more;
    for (int k = 1; k <= extra; ++k)
      more.push_back(large ? lambdas.back() * std::pow(ratio, k) : lambdas.front() / std::pow(ratio, k));
    if (logc) std::erase_if(more, [](double l) { return !(l < 1.0); });
    auto extra_pts = run_set(more);
    points.insert(points.end(), extra_pts.begin(), extra_pts.end());
    wf = fit_window(points);
    out.widened = true;
  }

  out.slope = wf.fit.slope;
  out.intercept = wf.fit.intercept;
  out.stderr_ = wf.fit.slope_stderr;
  out.uncorrected_slope = wf.plain.slope;
  out.uncorrected_stderr = wf.plain.slope_stderr;
  const double tol = spec.absolute_tolerance.value_or(spec.tolerance * std::abs(pred.exponent));
  out.pass = std::abs(out.slope - pred.exponent) <= tol;
  out.points = std::move(points);
  return out;
}

SampledField rescale_data(const SampledField& phi, double mu, double p) {
  if (!(mu > 0.0) || !std::isfinite(mu)) fail("scale mu must be positive");
  if (!(p > 1.0)) fail("rescaling needs p > 1");
  const Grid& g = phi.grid();
  const Grid scaled(g.domain().scaled(1.0 / mu), g.h() / mu);
  if (scaled.size() != g.size()) fail("rescaled grid changed node count");
  const double a = std::pow(mu, 1.0 / (p - 1.0));
  std::vector<double> v(phi.values().begin(), phi.values().end());
  for (double& x : v) x *= a;
  return SampledField(scaled, std::move(v));
}

ScalingResult scaling_check(const SampledField& phi, double mu, const SolverConfig& cfg,
                            double horizon) {
  ScalingResult out;
  const RunResult base = run(phi, cfg, horizon);
  if (base.report.status != RunStatus::BlownUp)
    fail(ErrorKind::Numerical, "scaling_check: base run reached the horizon without blow-up");
  out.base = base.report;
  if (mu == 1.0) {
    out.scaled = base.report;
    out.ratio = 1.0;
    return out;
  }
  const RunResult sc = run(rescale_data(phi, mu, cfg.p), cfg, horizon / (mu * mu));
  if (sc.report.status != RunStatus::BlownUp)
    fail(ErrorKind::Numerical, "scaling_check: scaled run reached the horizon without blow-up");
  out.scaled = sc.report;
  out.ratio = mu * mu * sc.report.t_hat / base.report.t_hat;
  return out;
}

ComparisonResult comparison_test(const SampledField& phi1, const SampledField& phi2,
                                 const SolverConfig& cfg, double horizon) {
  if (phi1.size() != phi2.size() || phi1.h() != phi2.h() ||
      phi1.grid().domain().kind() != phi2.grid().domain().kind() || phi1.grid().nx() != phi2.grid().nx())
    fail("comparison_test: data must live on the same grid");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("comparison_test: horizon must be positive");
  for (std::size_t i = 0; i < phi1.size(); ++i)
    if (phi1[i] > phi2[i]) fail("comparison_test: phi1 <= phi2 violated at node " + std::to_string(i));

  const ExplicitStepper stepper(phi1.grid(), cfg);
  std::vector<double> u1(phi1.values().begin(), phi1.values().end()), u2(phi2.values().begin(), phi2.values().end());
  std::vector<double> n1(u1.size()), n2(u2.size());
  ComparisonResult out;
  double t = 0.0;
  while (t < horizon) {
    double dt = std::min(stepper.controlled_dt(u1), stepper.controlled_dt(u2));
    const bool last = dt >= horizon - t;
    if (last) dt = horizon - t;
    if (!last && t + dt == t) {
      out.reached_threshold = true;
      break;
    }
    const double s1 = stepper.advance(u1, n1, dt);
    const double s2 = stepper.advance(u2, n2, dt);
    if (!std::isfinite(s1) || !std::isfinite(s2)) {
      out.reached_threshold = true;
      break;
    }
    t = last ? horizon : t + dt;
    ++out.steps;
    u1.swap(n1);
    u2.swap(n2);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u1.size(); ++i) worst = std::max(worst, u1[i] - u2[i]);
    out.max_violation = out.steps == 1 ? worst : std::max(out.max_violation, worst);
    if (worst > 0.0 && s2 > 0.0) out.max_relative_violation = std::max(out.max_relative_violation, worst / s2);
    if (s1 >= cfg.u_max || s2 >= cfg.u_max) {
      out.reached_threshold = true;
      break;
    }
  }
  out.t_end = t;
  return out;
}

RateResult rate_check(const SupNormHistory& history, double t_hat, double p, int dimension,
                      double r, RateWindow window) {
  if (!(t_hat > 0.0) || !std::isfinite(t_hat)) fail("rate_check: T_hat must be positive");
  if (!(p > 1.0)) fail("rate_check: p must exceed 1");
  if (!rate_admissible_r(p, dimension, r))
    fail(ErrorKind::HypothesisViolated, "theorem hypothesis violated: r below the blow-up rate floor");
  if (!(window.lo > 0.0 && window.lo < window.hi && window.hi < 1.0)) fail("rate_check: bad window");

  const bool sup = std::isinf(r);
  const std::size_t col = sup ? 0 : history.lr_column(r);
  RateResult out;
  out.exponent = 1.0 / (2.0 * (p - 1.0)) - (sup ? 0.0 : dimension / (2.0 * r));
  double nearest = std::numeric_limits<double>::infinity(), farthest = 0.0;
  out.inf_val = std::numeric_limits<double>::infinity();
  for (const auto& s : history.samples()) {
    const double gap = t_hat - s.t;
    if (!(gap > 0.0)) continue;
    nearest = std::min(nearest, gap);
    farthest = std::max(farthest, gap);
    if (gap < window.lo * t_hat || gap > window.hi * t_hat) continue;
    const double norm = sup ? s.sup_norm : s.lr[col];
    const double v = std::pow(gap, out.exponent) * norm;
    out.inf_val = std::min(out.inf_val, v);
    out.sup_val = std::max(out.sup_val, v);
    ++out.samples;
  }
  if (nearest > window.lo * t_hat || farthest < window.hi * t_hat || out.samples < 3)
    fail(ErrorKind::Numerical, "rate_check: history does not cover the rate window");
  return out;
}

DecayResult decay_check(const SupNormHistory& history, const BlowupReport& report, double p,
                        double flat_tolerance) {
  if (report.status == RunStatus::BlownUp) fail(ErrorKind::Numerical, "decay_check: run blew up");
  if (!(p > 1.0)) fail("decay_check: p must exceed 1");
  if (history.empty()) fail("decay_check: empty history");
  const double e = 1.0 / (2.0 * (p - 1.0));
  const double t_end = history.samples().back().t;
  DecayResult out;
  std::vector<double> x, y;
  for (const auto& s : history.samples()) {
    if (s.t < 1.0) continue;
    const double v = std::pow(s.t, e) * s.sup_norm;
    out.sup_val = std::max(out.sup_val, v);
    if (s.t >= 0.1 * t_end && v > 0.0) {
      x.push_back(std::log(s.t));
      y.push_back(std::log(v));
    }
  }
  if (x.size() >= 2 && x.back() > x.front()) out.tail_slope = fit_line(x, y).slope;
  out.non_increasing = out.tail_slope <= flat_tolerance;
  return out;
}

TruncationCheck truncation_doubling_check(const InitialData& data, const Domain& domain, double h,
                                          Sampling sampling, const SolverConfig& cfg, double horizon,
                                          double tolerance) {
  TruncationCheck out;
  auto t_of = [&](const Domain& d) {
    SolverConfig c = cfg;
    c.snapshot_stride = 0;
    const BlowupReport rep = run(sample_initial(data, Grid(d, h), sampling), c, horizon).report;
    return rep.status == RunStatus::BlownUp ? rep.t_hat : kInfinity;
  };
  out.t_hat = t_of(domain);
  if (!domain.truncated()) {
    out.t_hat_doubled = out.t_hat;
    out.pass = true;
    return out;
  }
  out.t_hat_doubled = t_of(domain.scaled(2.0));
  if (std::isinf(out.t_hat) && std::isinf(out.t_hat_doubled)) out.relative_change = 0.0;
  else if (std::isinf(out.t_hat) || std::isinf(out.t_hat_doubled)) out.relative_change = kInfinity;
  else out.relative_change = std::abs(out.t_hat_doubled - out.t_hat) / out.t_hat;
  out.pass = out.relative_change < tolerance;
  return out;
}

SandwichBand sandwich_band(const ExponentFit& fit, double slope, double decades) {
  if (fit.points.empty()) fail("sandwich_band: empty sweep");
  double top = 0.0;
  for (const auto& pt : fit.points)
    if (pt.status == "blown_up") top = std::max(top, pt.lambda);
  SandwichBand band;
  band.slope = slope;
  band.offset_min = std::numeric_limits<double>::infinity();
  band.offset_max = -std::numeric_limits<double>::infinity();
  for (const auto& pt : fit.points) {
    if (pt.status != "blown_up" || pt.lambda < top * std::pow(10.0, -decades) * (1 - 1e-9)) continue;
    const double off = std::log(pt.t_hat) - slope * std::log(pt.lambda);
    band.offset_min = std::min(band.offset_min, off);
    band.offset_max = std::max(band.offset_max, off);
    ++band.points;
  }
  if (band.points < 2) fail(ErrorKind::Numerical, "sandwich_band: fewer than 2 points in the top window");
  return band;
}

}  // namespace ulheat
