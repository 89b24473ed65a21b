#include "ulheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ulheat/error.hpp"
#include "ulheat/regression.hpp"
#include "ulheat/uloc_norms.hpp"

namespace ulheat {

double SolverConfig::courant(int dimension) const {
  if (cfl) return *cfl;
  return dimension == 2 ? 0.2 : 0.4;
}

void SolverConfig::validate(int dimension) const {
  if (!(p >= 1.0) || !std::isfinite(p)) fail("solver p must be >= 1");
  const double c = courant(dimension);
  if (!(c > 0.0) || c > max_courant(dimension)) {
    std::ostringstream msg;
    msg << "cfl " << c << " outside (0, " << max_courant(dimension) << "] for N=" << dimension;
    fail(msg.str());
  }
  if (!(u_max > 0.0)) fail("u_max must be positive");
  if (fit_window < 3) fail("fit_window must be at least 3");
  if (sample_stride == 0) fail("sample_stride must be at least 1");
}

double boundary_flux(double u, double p) noexcept {
  if (p == 1.0) return u;
  if (p == 2.0) return u * std::abs(u);
  if (p == 3.0) return u * u * u;
  return std::copysign(std::pow(std::abs(u), p), u);
}

ExplicitStepper::ExplicitStepper(const Grid& grid, const SolverConfig& config)
    : grid_(grid), config_(config) {
  config_.validate(grid.dimension());
  base_dt_ = config_.courant(grid.dimension()) * grid.h() * grid.h();
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (grid.classify(k) == NodeClass::PhysicalBoundary) flux_nodes_.push_back(k);
}

double ExplicitStepper::controlled_dt(std::span<const double> u) const {
  double dt = base_dt_;
  if (!config_.flux_enabled || config_.p <= 1.0) return dt;
  double ub = 0.0;
  for (std::size_t k : flux_nodes_) ub = std::max(ub, std::abs(u[k]));
  if (ub == 0.0) return dt;
  const double rate = config_.p * std::pow(ub, config_.p - 1.0) / grid_.h();
  while (dt * rate >= 1.0) dt *= 0.5;
  return dt;
}

double ExplicitStepper::ghost_term(double boundary_value, FaceKind kind) const noexcept {
  if (kind != FaceKind::Physical || !config_.flux_enabled) return 0.0;
  return 2.0 * grid_.h() * boundary_flux(boundary_value, config_.p);
}

double ExplicitStepper::advance(std::span<const double> u, std::span<double> out, double dt) const {
  const double limit = SolverConfig::max_courant(grid_.dimension());
  if (dt / (grid_.h() * grid_.h()) > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "CFL violation: dt/h^2 = " << dt / (grid_.h() * grid_.h()) << " exceeds " << limit;
    fail(ErrorKind::Numerical, msg.str());
  }
  return grid_.dimension() == 1 ? advance_1d(u, out, dt) : advance_2d(u, out, dt);
}

double ExplicitStepper::advance_1d(std::span<const double> u, std::span<double> out,
                                   double dt) const {
  const std::size_t n = grid_.nx();
  const double c = dt / (grid_.h() * grid_.h());
  double peak = 0.0;

  const double ghost_lo = u[1] + ghost_term(u[0], grid_.face_kind(Face::XLow));
  out[0] = u[0] + c * (ghost_lo - 2.0 * u[0] + u[1]);
  peak = std::abs(out[0]);

  const double* in = u.data();
  double* dst = out.data();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double v = in[i] + c * (in[i - 1] - 2.0 * in[i] + in[i + 1]);
    dst[i] = v;
    peak = std::max(peak, std::abs(v));
  }

  const double ghost_hi = u[n - 2] + ghost_term(u[n - 1], grid_.face_kind(Face::XHigh));
  out[n - 1] = u[n - 1] + c * (u[n - 2] - 2.0 * u[n - 1] + ghost_hi);
  return std::max(peak, std::abs(out[n - 1]));
}

double ExplicitStepper::advance_2d(std::span<const double> u, std::span<double> out,
                                   double dt) const {
  const std::size_t nx = grid_.nx();
  const std::size_t ny = grid_.ny();
  const double c = dt / (grid_.h() * grid_.h());
  const FaceKind xlo = grid_.face_kind(Face::XLow), xhi = grid_.face_kind(Face::XHigh);
  const FaceKind ylo = grid_.face_kind(Face::YLow), yhi = grid_.face_kind(Face::YHigh);
  double peak = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t row = j * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = row + i;
      const double uc = u[k];
      const double west = i > 0 ? u[k - 1] : u[k + 1] + ghost_term(uc, xlo);
      const double east = i + 1 < nx ? u[k + 1] : u[k - 1] + ghost_term(uc, xhi);
      const double south = j > 0 ? u[k - nx] : u[k + nx] + ghost_term(uc, ylo);
      const double north = j + 1 < ny ? u[k + nx] : u[k - nx] + ghost_term(uc, yhi);
      const double v = uc + c * (west + east + south + north - 4.0 * uc);
      out[k] = v;
      peak = std::max(peak, std::abs(v));
    }
  }
  return peak;
}

SampledField step(const SampledField& u, const SolverConfig& cfg) {
  const ExplicitStepper stepper(u.grid(), cfg);
  return step(u, cfg, stepper.controlled_dt(u.values()));
}

SampledField step(const SampledField& u, const SolverConfig& cfg, double dt) {
  const ExplicitStepper stepper(u.grid(), cfg);
  std::vector<double> out(u.size());
  stepper.advance(u.values(), out, dt);
  for (double v : out)
    if (!std::isfinite(v)) fail(ErrorKind::Numerical, "step produced a non-finite value");
  return SampledField(u.grid(), std::move(out));
}

namespace {

HistorySample make_sample(double t, double sup, const SampledField& field, const SolverConfig& cfg) {
  HistorySample s;
  s.t = t;
  s.sup_norm = sup;
  s.uloc.reserve(cfg.uloc_probes.size());
  for (const auto& params : cfg.uloc_probes) s.uloc.push_back(uloc_norm(field, params));
  s.lr.reserve(cfg.lr_probes.size());
  for (double r : cfg.lr_probes) s.lr.push_back(field.lr_norm(r));
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

RunResult run(const SampledField& u0, const SolverConfig& cfg, double t_horizon) {
  if (!(t_horizon > 0.0) || !std::isfinite(t_horizon)) fail("run horizon must be positive and finite");
  const ExplicitStepper stepper(u0.grid(), cfg);
  const Grid& grid = u0.grid();

  SupNormHistory history(cfg.uloc_probes, cfg.lr_probes);
  std::vector<Snapshot> snapshots;
  std::vector<double> current(u0.values().begin(), u0.values().end());
  std::vector<double> next(current.size());

  history.append(make_sample(0.0, u0.sup_norm(), u0, cfg));
  if (cfg.snapshot_stride > 0) snapshots.push_back({0.0, u0});

  BlowupReport report;
  report.grid_h = grid.h();
  double t = 0.0;
  std::size_t steps = 0;
  bool crossed = u0.sup_norm() >= cfg.u_max;
  double t_cross = crossed ? 0.0 : std::numeric_limits<double>::quiet_NaN();

  while (!crossed && t < t_horizon) {
    const double dt_ctrl = stepper.controlled_dt(current);
    const bool fast = dt_ctrl < stepper.base_dt();
    const double remaining = t_horizon - t;
    const bool last = dt_ctrl >= remaining;
    const double dt = last ? remaining : dt_ctrl;
    if (!last && t + dt == t) {
      // The controlled step no longer advances the clock: the solution is
      // blowing up faster than the time axis resolves.
      crossed = true;
      t_cross = t;
      break;
    }
    const double peak = stepper.advance(current, next, dt);
    t = last ? t_horizon : t + dt;
    ++steps;

    if (!std::isfinite(peak) || peak >= cfg.u_max) {
      crossed = true;
      t_cross = t;
      if (std::isfinite(peak) && all_finite(next)) {
        current.swap(next);
        const SampledField field(grid, current);
        history.append(make_sample(t, peak, field, cfg));
        if (cfg.snapshot_stride > 0) snapshots.push_back({t, field});
      }
      break;
    }
    current.swap(next);

    const bool record = fast || last || steps % cfg.sample_stride == 0;
    const bool snap = cfg.snapshot_stride > 0 && (last || steps % cfg.snapshot_stride == 0);
    if (record || snap) {
      const SampledField field(grid, current);
      if (record) history.append(make_sample(t, peak, field, cfg));
      if (snap) snapshots.push_back({t, field});
    }
  }

  report.steps = steps;
  report.t_end = t;
  if (crossed) {
    report.status = RunStatus::BlownUp;
    report.t_bracket = {t_cross, t_cross};
    try {
      const BlowupFit fit = estimate_blowup_time(history, cfg.p, cfg.fit_window);
      report.t_hat = fit.t_hat;
      report.fit_r2 = fit.r2;
      report.t_hat_spread = fit.spread;
      report.t_bracket = {fit.window_start, t_cross};
      report.extrapolated = true;
    } catch (const Error&) {
      report.t_hat = t_cross;
      report.fit_r2 = 0.0;
      report.t_hat_spread = 0.0;
      report.extrapolated = false;
    }
    report.low_confidence = !(report.fit_r2 >= 0.99);
  } else {
    report.status = RunStatus::GlobalByHorizon;
  }
  return {std::move(history), report, std::move(snapshots), SampledField(grid, std::move(current))};
}

BlowupFit estimate_blowup_time(const SupNormHistory& history, double p, std::size_t fit_window) {
  if (!(p > 1.0)) fail("blow-up extrapolation needs p > 1");
  if (fit_window < 3) fail("fit_window must be at least 3");
  const auto& samples = history.samples();
  if (samples.size() < fit_window) fail(ErrorKind::Numerical, "no blow-up trend: too few samples");

  const std::size_t first = samples.size() - fit_window;
  std::vector<double> t(fit_window), w(fit_window);
  for (std::size_t k = 0; k < fit_window; ++k) {
    const auto& s = samples[first + k];
    if (k > 0 && !(s.sup_norm > samples[first + k - 1].sup_norm))
      fail(ErrorKind::Numerical, "no blow-up trend");
    if (!(s.sup_norm > 0.0)) fail(ErrorKind::Numerical, "no blow-up trend");
    t[k] = s.t;
    w[k] = std::pow(s.sup_norm, -2.0 * (p - 1.0));
  }

  const LinearFit full = fit_line(t, w);
  if (!(full.slope < 0.0)) fail(ErrorKind::Numerical, "no blow-up trend");

  BlowupFit out;
  out.t_hat = full.zero_crossing();
  out.r2 = full.r2;
  out.window_start = t.front();

  // Zero crossings of the leading and trailing halves.
  const std::size_t half = fit_window / 2;
  double lo = out.t_hat, hi = out.t_hat;
  for (auto [a, b] : {std::pair{std::size_t{0}, half + 1}, std::pair{fit_window - half - 1, fit_window}}) {
    if (b - a < 2) continue;
    const LinearFit sub = fit_line(std::span(t).subspan(a, b - a), std::span(w).subspan(a, b - a));
    if (sub.slope < 0.0) {
      lo = std::min(lo, sub.zero_crossing());
      hi = std::max(hi, sub.zero_crossing());
    }
  }
  out.spread = hi - lo;
  return out;
}

namespace {

double bump(double s) noexcept {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double bump_derivative(double s) noexcept {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return bump(s) * (-2.0 * s / (q * q));
}

}  // namespace

double BumpTestFunction::value(double x, double y, double t) const noexcept {
  const double r = std::hypot(x - center[0], y - center[1]);
  return bump(r / radius) * bump((t - t0) / tau);
}

double BumpTestFunction::dt(double x, double y, double t) const noexcept {
  const double r = std::hypot(x - center[0], y - center[1]);
  return bump(r / radius) * bump_derivative((t - t0) / tau) / tau;
}

std::array<double, 2> BumpTestFunction::grad(double x, double y, double t) const noexcept {
  const double dx = x - center[0], dy = y - center[1];
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return {0.0, 0.0};
  const double radial = bump_derivative(r / radius) / radius * bump((t - t0) / tau);
  return {radial * dx / r, radial * dy / r};
}

double weak_residual(std::span<const Snapshot> trajectory, const BumpTestFunction& test_fn,
                     double p, bool flux_enabled) {
  if (trajectory.size() < 2) fail("weak_residual needs at least two snapshots");
  const Grid& grid = trajectory.front().field.grid();
  const Domain& domain = grid.domain();
  const double a = test_fn.radius;
  const auto& c = test_fn.center;

  // The bump may straddle physical faces but must vanish on artificial ones.
  auto exits = [&](Face face) {
    if (grid.face_kind(face) != FaceKind::Artificial) return false;
    switch (face) {
      case Face::XLow: return c[0] - a <= 0.0;
      case Face::XHigh: return c[0] + a >= domain.lx();
      case Face::YLow: return c[1] - a <= 0.0;
      case Face::YHigh: return c[1] + a >= domain.ly();
    }
    return false;
  };
  for (Face face : {Face::XLow, Face::XHigh, Face::YLow, Face::YHigh})
    if (exits(face)) fail("test function support exits the truncated domain");
  if (test_fn.t0 - test_fn.tau < trajectory.front().t || test_fn.t0 + test_fn.tau > trajectory.back().t)
    fail("test function time support exceeds the stored trajectory");

  const std::size_t nx = grid.nx(), ny = grid.ny();
  const double h = grid.h();
  const bool two_d = grid.dimension() == 2;

  auto integrand = [&](const Snapshot& snap) {
    const auto u = snap.field.values();
    const double t = snap.t;
    long double bulk = 0.0L;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const auto pos = grid.position(k);
      bulk -= grid.trapezoid_weight(k) * u[k] * test_fn.dt(pos[0], pos[1], t);
    }
    // grad u . grad phi on cell edges, midpoint rule along the edge direction.
    for (std::size_t j = 0; j < ny; ++j) {
      const double row_weight = two_d ? ((j == 0 || j + 1 == ny) ? 0.5 * h : h) : 1.0;
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const std::size_t k = j * nx + i;
        const double xm = (static_cast<double>(i) + 0.5) * h, ym = static_cast<double>(j) * h;
        bulk += (u[k + 1] - u[k]) * test_fn.grad(xm, ym, t)[0] * row_weight;
      }
    }
    if (two_d) {
      for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
          const std::size_t k = j * nx + i;
          const double col_weight = (i == 0 || i + 1 == nx) ? 0.5 * h : h;
          const double xm = static_cast<double>(i) * h, ym = (static_cast<double>(j) + 0.5) * h;
          bulk += (u[k + nx] - u[k]) * test_fn.grad(xm, ym, t)[1] * col_weight;
        }
      }
    }

    long double boundary = 0.0L;
    if (flux_enabled) {
      auto face_sum = [&](Face face) {
        if (grid.face_kind(face) != FaceKind::Physical) return;
        const bool along_y = face == Face::XLow || face == Face::XHigh;
        const std::size_t count = along_y ? ny : nx;
        for (std::size_t m = 0; m < count; ++m) {
          std::size_t k = 0;
          switch (face) {
            case Face::XLow: k = m * nx; break;
            case Face::XHigh: k = m * nx + nx - 1; break;
            case Face::YLow: k = m; break;
            case Face::YHigh: k = (ny - 1) * nx + m; break;
          }
          const double weight = two_d ? ((m == 0 || m + 1 == count) ? 0.5 * h : h) : 1.0;
          const auto pos = grid.position(k);
          boundary += weight * boundary_flux(u[k], p) * test_fn.value(pos[0], pos[1], t);
        }
      };
      for (Face face : {Face::XLow, Face::XHigh, Face::YLow, Face::YHigh}) {
        if (!two_d && (face == Face::YLow || face == Face::YHigh)) continue;
        face_sum(face);
      }
    }
    return static_cast<double>(bulk - boundary);
  };

  long double total = 0.0L;
  double prev = integrand(trajectory.front());
  for (std::size_t s = 1; s < trajectory.size(); ++s) {
    const double cur = integrand(trajectory[s]);
    total += 0.5L * (trajectory[s].t - trajectory[s - 1].t) * (prev + cur);
    prev = cur;
  }
  return std::abs(static_cast<double>(total));
}

double exact_linear_solution(double x, double t) noexcept { return std::exp(t - x); }

}  // namespace ulheat
