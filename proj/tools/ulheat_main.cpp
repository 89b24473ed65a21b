#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ulheat/calibration.hpp"
#include "ulheat/config.hpp"
#include "ulheat/error.hpp"
#include "ulheat/experiments.hpp"
#include "ulheat/output.hpp"
#include "ulheat/parallel.hpp"
#include "ulheat/uloc_norms.hpp"

using namespace ulheat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::size_t> jobs;
  bool verbose = false;
};

bool g_verbose = false;

void note(const std::string& msg) {
  if (g_verbose) std::cerr << "ulheat: " << msg << '\n';
}

const ProblemConfig& need_problem(const ConfigBundle& b, const std::string& command) {
  if (!b.problem) fail(ErrorKind::ConfigSchema, "config domain: required by " + command);
  return *b.problem;
}

json exponent_json(double r) { return std::isinf(r) ? json("inf") : json(r); }

void write_run_files(const fs::path& dir, const RunResult& res) {
  write_text(dir, "history.csv", history_csv(res.history));
  write_text(dir, "plot.svg", trace_svg(res.history));
  if (res.snapshots.empty()) return;
  const fs::path snap = dir / "snapshots";
  ensure_output_dir(snap);
  std::string index = "k,t\n";
  for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
    write_text(snap, name, snapshot_csv(res.snapshots[k].field));
    index += std::to_string(k) + "," + format_number(res.snapshots[k].t) + "\n";
  }
  write_text(snap, "index.csv", index);
}

json cmd_solve(const ConfigBundle& b, const fs::path& dir, bool require_blowup) {
  const ProblemConfig& pc = need_problem(b, require_blowup ? "blowup-time" : "solve");
  note("running " + pc.domain.name() + " with h = " + format_number(pc.h));
  const RunResult res = run(pc.initial_field(), pc.solver, pc.horizon);
  write_run_files(dir, res);
  json out = to_json(res.report);
  if (require_blowup) {
    if (res.report.status == RunStatus::BlownUp && pc.domain.truncated()) {
      note("doubling the truncation length to check T_hat");
      const TruncationCheck tc = truncation_doubling_check(pc.u0, pc.domain, pc.h, pc.sampling, pc.solver, pc.horizon);
      out["truncation_check"] = {{"T_hat_doubled", std::isfinite(tc.t_hat_doubled) ? json(tc.t_hat_doubled) : json("inf")},
                                 {"relative_change", std::isfinite(tc.relative_change) ? json(tc.relative_change) : json("inf")},
                                 {"pass", tc.pass}};
    }
    write_report(dir, "blowup-time", b.echo, out, 0.0);
    if (res.report.status != RunStatus::BlownUp)
      fail(ErrorKind::Numerical, "no blow-up trend: run reached the horizon");
    if (!res.report.extrapolated)
      fail(ErrorKind::Numerical, "no blow-up trend: extrapolation failed, T_hat is the crossing time");
  }
  return out;
}

json cmd_sweep(const ConfigBundle& b, const fs::path& dir, std::size_t jobs) {
  if (!b.sweep) fail(ErrorKind::ConfigSchema, "config sweep: required by sweep");
  ExperimentSpec spec = *b.sweep;
  spec.jobs = jobs;
  note("sweeping " + std::to_string(spec.lambda_grid.size()) + " lambda values on " + std::to_string(jobs) + " workers");
  const ExponentFit fit = lambda_sweep(spec);
  write_text(dir, "sweep.csv", sweep_csv(fit));
  write_text(dir, "plot.svg", sweep_svg(fit));
  return to_json(fit);
}

json cmd_scaling(const ConfigBundle& b, const fs::path& dir) {
  const ProblemConfig& pc = need_problem(b, "scaling-check");
  const SampledField phi = pc.initial_field();
  const RunResult base = run(phi, pc.solver, pc.horizon);
  write_run_files(dir, base);
  json checks = json::array();
  double worst = 1.0;
  for (double mu : b.scaling.mu) {
    const ScalingResult r = scaling_check(phi, mu, pc.solver, pc.horizon);
    note("mu = " + format_number(mu) + ": ratio " + format_number(r.ratio));
    checks.push_back({{"mu", mu}, {"ratio", r.ratio}, {"T_hat", r.base.t_hat}, {"T_hat_mu", r.scaled.t_hat}});
    if (std::abs(r.ratio - 1.0) > std::abs(worst - 1.0)) worst = r.ratio;
  }
  return json{{"ratio", worst}, {"checks", checks}};
}

json cmd_compare(const ConfigBundle& b) {
  const ProblemConfig& pc = need_problem(b, "compare");
  if (!b.compare) fail(ErrorKind::ConfigSchema, "config compare: required by compare");
  const Grid g = pc.grid();
  const SampledField lo = sample_initial(b.compare->lower, g, pc.sampling);
  const SampledField hi = sample_initial(b.compare->upper, g, pc.sampling);
  const ComparisonResult r = comparison_test(lo, hi, pc.solver, pc.horizon);
  return json{{"max_violation", r.max_violation},
              {"max_relative_violation", r.max_relative_violation},
              {"steps", r.steps},
              {"t_end", r.t_end},
              {"reached_threshold", r.reached_threshold},
              {"ordered", r.max_relative_violation <= 1e-10}};
}

json cmd_ulnorm(const ConfigBundle& b, std::size_t jobs) {
  const ProblemConfig& pc = need_problem(b, "ulnorm");
  const SampledField f = pc.initial_field();
  const UlnormConfig& u = b.ulnorm;
  json out;
  json norms = json::array();
  for (const auto& q : u.norms) norms.push_back({{"r", exponent_json(q.r)}, {"rho", q.rho}, {"value", uloc_norm(f, q)}});
  out["norms"] = norms;
  if (u.holder_q) {
    json hb = json::array();
    for (const auto& q : u.norms) {
      const BoundPair bp = holder_embedding_bound(f, q.r, *u.holder_q, q.rho);
      hb.push_back({{"r", exponent_json(q.r)}, {"q", *u.holder_q}, {"rho", q.rho}, {"lhs", bp.lhs}, {"rhs", bp.rhs}});
    }
    out["holder"] = hb;
  }
  if (u.covering) {
    json cv = json::array();
    for (const auto& q : u.norms) {
      const BoundPair bp = covering_inequality_check(f, q.r, q.rho);
      cv.push_back({{"r", exponent_json(q.r)}, {"rho", q.rho}, {"lhs", bp.lhs}, {"rhs", bp.rhs},
                    {"M", covering_centers(f.dimension()).count()}});
    }
    out["covering"] = cv;
  }
  if (u.gate) {
    double gamma = 0.0;
    json gj;
    if (u.gamma) {
      gamma = *u.gamma;
      gj["gamma_source"] = "config";
    } else {
      GateCalibrationSpec cal = u.calibration;
      cal.jobs = jobs;
      note("calibrating gamma over " + std::to_string(calibration_family(cal).size()) + " shapes");
      const GateCalibration c = calibrate_gamma(cal);
      gamma = c.gamma;
      gj["gamma_source"] = "calibrated";
      json shapes = json::array();
      for (const auto& s : c.shapes)
        shapes.push_back({{"name", s.name}, {"amplitude", s.amplitude}, {"gate_value", s.gate_value}});
      gj["calibration"] = {{"margin", cal.margin}, {"mu", cal.mu}, {"shapes", shapes}};
    }
    const GateResult g = smallness_gate(f, u.gate_r, u.gate_rho, gamma, pc.solver.p, f.dimension());
    gj["gamma"] = gamma;
    gj["lhs"] = g.lhs;
    gj["pass"] = g.pass;
    gj["r"] = exponent_json(u.gate_r);
    gj["rho"] = u.gate_rho;
    out["gate"] = gj;
  }
  return out;
}

json cmd_rate(const ConfigBundle& b, const fs::path& dir) {
  ProblemConfig pc = need_problem(b, "rate-check");
  for (double r : b.rate.r)
    if (std::isfinite(r) && std::find(pc.solver.lr_probes.begin(), pc.solver.lr_probes.end(), r) == pc.solver.lr_probes.end())
      pc.solver.lr_probes.push_back(r);
  const RunResult res = run(pc.initial_field(), pc.solver, pc.horizon);
  write_run_files(dir, res);
  if (res.report.status != RunStatus::BlownUp) fail(ErrorKind::Numerical, "no blow-up trend: run reached the horizon");
  const int dim = pc.domain.dimension();
  json checks = json::array();
  for (double r : b.rate.r) {
    const RateResult full = rate_check(res.history, res.report.t_hat, pc.solver.p, dim, r, b.rate.window);
    const RateResult half = rate_check(res.history, res.report.t_hat, pc.solver.p, dim, r,
                                       {b.rate.window.lo, 0.5 * b.rate.window.hi});
    checks.push_back({{"r", exponent_json(r)}, {"exponent", full.exponent}, {"inf_val", full.inf_val},
                      {"sup_val", full.sup_val}, {"samples", full.samples}, {"half_window_sup_val", half.sup_val}});
  }
  return json{{"report", to_json(res.report)}, {"checks", checks}};
}

json cmd_decay(const ConfigBundle& b, const fs::path& dir) {
  const ProblemConfig& pc = need_problem(b, "decay-check");
  const SampledField u0 = pc.initial_field();
  json out;
  const double q = u0.dimension() * (pc.solver.p - 1.0);
  if (q >= 1.0) out["u0_norm"] = {{"q", q}, {"value", u0.lr_norm(q)}};
  if (b.decay.calibrate) {
    const double horizon = b.decay.calibration_horizon > 0.0 ? b.decay.calibration_horizon : pc.horizon;
    note("calibrating the decay gate by bisection on the amplitude of u0");
    const DecayCalibration c = calibrate_decay_gamma(u0, pc.solver, horizon, b.decay.margin);
    out["gamma"] = c.gamma;
    out["threshold_amplitude"] = c.threshold_amplitude;
    out["below_gamma"] = u0.lr_norm(q) <= c.gamma;
  }
  const RunResult res = run(u0, pc.solver, pc.horizon);
  write_run_files(dir, res);
  out["report"] = to_json(res.report);
  const DecayResult d = decay_check(res.history, res.report, pc.solver.p, b.decay.flat_tolerance);
  out["sup_val"] = d.sup_val;
  out["tail_slope"] = d.tail_slope;
  out["non_increasing"] = d.non_increasing;
  return out;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ConfigSchema: return 2;
    case ErrorKind::HypothesisViolated: return 3;
    case ErrorKind::Io: return 4;
    case ErrorKind::Numerical: return 5;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat equation with nonlinear boundary flux: solver and experiments"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "integrate to blow-up or the horizon"},
      {"blowup-time", "integrate and require an extrapolated blow-up time"},
      {"sweep", "lambda sweep and exponent fit"},
      {"scaling-check", "parabolic scaling of the blow-up time"},
      {"compare", "comparison principle for ordered data"},
      {"ulnorm", "uniformly local norms, embeddings and the smallness gate"},
      {"rate-check", "blow-up rate bounds"},
      {"decay-check", "decay of small global solutions"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opt.config, "JSON config file")->required();
    sub->add_option("-o,--out", opt.out, "output directory");
    sub->add_option("-j,--jobs", opt.jobs, "worker threads (ULHEAT_JOBS overrides)");
    sub->add_flag("-v,--verbose", opt.verbose, "progress on stderr");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g_verbose = opt.verbose;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const auto start = std::chrono::steady_clock::now();
    const ConfigBundle b = load_config(opt.config);
    const fs::path dir(opt.out);
    ensure_output_dir(dir);
    const std::size_t jobs = resolve_jobs(opt.jobs ? opt.jobs : b.jobs);

    json results;
    if (command == "solve") results = cmd_solve(b, dir, false);
    else if (command == "blowup-time") results = cmd_solve(b, dir, true);
    else if (command == "sweep") results = cmd_sweep(b, dir, jobs);
    else if (command == "scaling-check") results = cmd_scaling(b, dir);
    else if (command == "compare") results = cmd_compare(b);
    else if (command == "ulnorm") results = cmd_ulnorm(b, jobs);
    else if (command == "rate-check") results = cmd_rate(b, dir);
    else if (command == "decay-check") results = cmd_decay(b, dir);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json config = b.echo;
    config["jobs"] = jobs;
    write_report(dir, command, config, results, wall);
    note("wrote " + (dir / "report.json").string());
    return 0;
  } catch (const Error& e) {
    std::cerr << "ulheat: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ulheat: " << e.what() << '\n';
    return 1;
  }
}
