#include "ulheat/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ulheat/error.hpp"

namespace ulheat {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  fail(ErrorKind::ConfigSchema, "config " + path + ": " + msg);
}

// Reads one JSON object, tracks the keys it consumed and mirrors every value
// (defaults included) into `echo`.
class Section {
 public:
  Section(const json& j, std::string path, json& echo) : j_(j), path_(std::move(path)), echo_(echo) {
    if (!j_.is_object()) schema(path_, "expected an object");
    echo_ = json::object();
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    const double v = has(key) ? as_number(raw(key), at(key)) : fallback;
    echo_[key] = v;
    return v;
  }

  double required_number(const std::string& key) {
    if (!has(key)) schema(at(key), "required");
    return number(key, 0.0);
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }

  // Number or the string "inf".
  double exponent(const std::string& key, double fallback) {
    const double v = has(key) ? as_exponent(raw(key), at(key)) : fallback;
    echo_[key] = exponent_json(v);
    return v;
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min_value) {
    std::size_t v = fallback;
    if (has(key)) {
      const json& x = raw(key);
      if (!x.is_number_integer() && !x.is_number_unsigned()) schema(at(key), "expected an integer");
      const auto i = x.get<long long>();
      if (i < static_cast<long long>(min_value)) schema(at(key), "must be at least " + std::to_string(min_value));
      v = static_cast<std::size_t>(i);
    }
    echo_[key] = v;
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    bool v = fallback;
    if (has(key)) {
      const json& x = raw(key);
      if (!x.is_boolean()) schema(at(key), "expected true or false");
      v = x.get<bool>();
    }
    echo_[key] = v;
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    std::string v = fallback;
    if (has(key)) {
      const json& x = raw(key);
      if (!x.is_string()) schema(at(key), "expected a string");
      v = x.get<std::string>();
    }
    echo_[key] = v;
    return v;
  }

  json& echo(const std::string& key) { return echo_[key]; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) schema(at(key), "unknown key");
  }

  static double as_number(const json& x, const std::string& path) {
    if (!x.is_number()) schema(path, "expected a number");
    const double v = x.get<double>();
    if (!std::isfinite(v)) schema(path, "must be finite");
    return v;
  }

  static double as_exponent(const json& x, const std::string& path) {
    if (x.is_string()) {
      if (x.get<std::string>() == "inf") return kInfinity;
      schema(path, "expected a number or \"inf\"");
    }
    const double v = as_number(x, path);
    if (!(v >= 1.0)) schema(path, "exponent must be at least 1");
    return v;
  }

  static json exponent_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

 private:
  const json& j_;
  std::string path_;
  json& echo_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) schema(path, "must be positive");
}

InitialData parse_profile(const json& j, const std::string& path, json& echo) {
  if (j.is_number()) {
    const double lambda = Section::as_number(j, path);
    echo = json{{"kind", "constant"}, {"lambda", lambda}};
    return InitialData::constant(lambda);
  }
  Section s(j, path, echo);
  const std::string kind = s.text("kind", "constant");
  InitialData d;
  if (kind == "constant") {
    d = InitialData::constant(s.number("lambda", 1.0));
  } else if (kind == "power_decay") {
    const double lambda = s.number("lambda", 1.0);
    const double beta = s.number("beta", 0.0);
    const double delta = s.number("delta", 1.0);
    if (beta < 0.0) schema(s.at("beta"), "must be nonnegative");
    positive(delta, s.at("delta"));
    d = InitialData::power_decay(lambda, beta, delta);
  } else if (kind == "bounded_power") {
    const double lambda = s.number("lambda", 1.0);
    const double beta = s.number("beta", 0.0);
    if (beta < 0.0) schema(s.at("beta"), "must be nonnegative");
    d = InitialData::bounded_power(lambda, beta);
  } else if (kind == "gaussian") {
    const double lambda = s.number("lambda", 1.0);
    const double width = s.number("width", 1.0);
    positive(width, s.at("width"));
    d = InitialData::gaussian(lambda, width);
  } else if (kind == "custom") {
    if (!s.has("values")) schema(s.at("values"), "required for custom data");
    const json& v = s.raw("values");
    if (!v.is_array()) schema(s.at("values"), "expected an array");
    std::vector<double> values;
    for (std::size_t i = 0; i < v.size(); ++i)
      values.push_back(Section::as_number(v[i], s.at("values") + "[" + std::to_string(i) + "]"));
    s.echo("values") = values;
    d = InitialData::custom_values(std::move(values));
    d.lambda = s.number("lambda", 1.0);
  } else {
    schema(s.at("kind"), "unknown profile kind \"" + kind + "\"");
  }
  s.finish();
  return d;
}

std::vector<UlocParams> parse_uloc_list(const json& j, const std::string& path, json& echo) {
  if (!j.is_array()) schema(path, "expected an array");
  std::vector<UlocParams> out;
  echo = json::array();
  for (std::size_t i = 0; i < j.size(); ++i) {
    json e;
    Section s(j[i], path + "[" + std::to_string(i) + "]", e);
    UlocParams u;
    u.r = s.exponent("r", 1.0);
    u.rho = s.required_number("rho");
    positive(u.rho, s.at("rho"));
    s.finish();
    out.push_back(u);
    echo.push_back(e);
  }
  return out;
}

std::vector<double> parse_exponent_list(const json& j, const std::string& path, json& echo) {
  std::vector<double> out;
  echo = json::array();
  if (!j.is_array()) {
    out.push_back(Section::as_exponent(j, path));
  } else {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(Section::as_exponent(j[i], path + "[" + std::to_string(i) + "]"));
  }
  for (double r : out) echo.push_back(Section::exponent_json(r));
  return out;
}

SolverConfig parse_solver(const json* j, double p, int dimension, json& echo) {
  static const json empty = json::object();
  Section s(j ? *j : empty, "solver", echo);
  SolverConfig c;
  c.p = p;
  if (s.has("cfl")) c.cfl = s.number("cfl", 0.0);
  else s.echo("cfl") = c.courant(dimension);
  c.u_max = s.number("u_max", c.u_max);
  c.fit_window = s.count("fit_window", c.fit_window, 3);
  c.sample_stride = s.count("sample_stride", c.sample_stride, 1);
  c.flux_enabled = s.boolean("flux", c.flux_enabled);
  c.snapshot_stride = s.count("snapshot_stride", c.snapshot_stride, 0);
  if (s.has("uloc")) c.uloc_probes = parse_uloc_list(s.raw("uloc"), s.at("uloc"), s.echo("uloc"));
  if (s.has("lr")) c.lr_probes = parse_exponent_list(s.raw("lr"), s.at("lr"), s.echo("lr"));
  s.finish();
  if (c.cfl && !(*c.cfl > 0.0 && *c.cfl <= SolverConfig::max_courant(dimension)))
    schema("solver.cfl", "must lie in (0, " + std::to_string(SolverConfig::max_courant(dimension)) + "]");
  if (!(c.u_max > 0.0)) schema("solver.u_max", "must be positive");
  return c;
}

std::vector<double> parse_lambda_grid(const json& j, const std::string& path, json& echo) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(Section::as_number(j[i], path + "[" + std::to_string(i) + "]"));
  } else {
    json e;
    Section s(j, path, e);
    const double lo = s.required_number("min");
    const double hi = s.required_number("max");
    const std::size_t n = s.count("count", 6, 2);
    s.finish();
    positive(lo, s.at("min"));
    if (!(hi > lo)) schema(s.at("max"), "must exceed min");
    for (std::size_t k = 0; k < n; ++k)
      out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1)));
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(out[i] > 0.0)) schema(path + "[" + std::to_string(i) + "]", "lambda must be positive");
  if (out.size() < 5) schema(path, "needs at least 5 lambda values");
  echo = out;
  return out;
}

Regime parse_regime(const std::string& name, const std::string& path) {
  if (name == "large_lambda_r") return Regime::LargeLambdaR;
  if (name == "large_lambda_beta") return Regime::LargeLambdaBeta;
  if (name == "small_lambda") return Regime::SmallLambda;
  schema(path, "unknown regime \"" + name + "\"");
}

Domain parse_domain(const std::string& name, double lx, std::optional<double> ly, const std::string& path) {
  if (name == "halfline" || name == "interval") {
    if (ly) schema("Ly", "only valid for 2D domains");
    return name == "halfline" ? Domain::half_line(lx) : Domain::interval(lx);
  }
  if (name == "halfplane" || name == "rectangle") {
    const double y = ly.value_or(name == "halfplane" ? 2.0 * lx : lx);
    positive(y, "Ly");
    return name == "halfplane" ? Domain::half_plane(lx, y) : Domain::rectangle(lx, y);
  }
  schema(path, "unknown domain \"" + name + "\" (halfline, interval, halfplane, rectangle)");
}

// Rethrows library validation failures as schema errors at `path`.
template <class Fn>
auto as_schema(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) schema(path, e.what());
    throw;
  }
}

}  // namespace

ConfigBundle parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigSchema, std::string("config is not valid JSON: ") + e.what());
  }

  ConfigBundle b;
  Section top(doc, "", b.echo);

  const double p = top.number("p", 2.0);
  if (!(p > 1.0) && p != 1.0) schema("p", "p must exceed 1");

  int dimension = 1;
  std::optional<std::string> domain_name;
  if (top.has("domain")) {
    domain_name = top.text("domain", "");
    dimension = (*domain_name == "halfplane" || *domain_name == "rectangle") ? 2 : 1;
  }
  const SolverConfig solver = parse_solver(top.has("solver") ? &top.raw("solver") : nullptr, p, dimension,
                                           top.echo("solver"));

  if (domain_name) {
    ProblemConfig pc;
    const double lx = top.required_number("L");
    positive(lx, "L");
    const auto ly = top.optional_number("Ly");
    const double h = top.required_number("h");
    positive(h, "h");
    pc.domain = as_schema("domain", [&] { return parse_domain(*domain_name, lx, ly, "domain"); });
    pc.h = h;
    as_schema("h", [&] { return pc.grid(); });
    if (!top.has("u0")) schema("u0", "required when a domain is given");
    pc.u0 = parse_profile(top.raw("u0"), "u0", top.echo("u0"));
    as_schema("u0", [&] {
      pc.u0.validate();
      return 0;
    });
    const std::string sampling = top.text("sampling", "nodewise");
    if (sampling == "nodewise") pc.sampling = Sampling::Nodewise;
    else if (sampling == "cell_average") pc.sampling = Sampling::CellAverage;
    else schema("sampling", "expected \"nodewise\" or \"cell_average\"");
    pc.horizon = top.number("horizon", 1.0);
    positive(pc.horizon, "horizon");
    pc.solver = solver;
    b.problem = pc;
  } else {
    for (const char* key : {"L", "Ly", "h", "u0", "sampling", "horizon"})
      if (top.has(key)) schema(key, "needs a domain");
  }

  if (top.has("sweep")) {
    Section s(top.raw("sweep"), "sweep", top.echo("sweep"));
    ExperimentSpec spec;
    const std::string kind = s.text("kind", "large");
    if (kind == "large") spec.kind = ExperimentKind::LambdaSweepLarge;
    else if (kind == "small") spec.kind = ExperimentKind::LambdaSweepSmall;
    else schema(s.at("kind"), "expected \"large\" or \"small\"");
    spec.p = p;
    spec.dimension = static_cast<int>(s.number("N", dimension));
    if (spec.dimension != 1 && spec.dimension != 2) schema(s.at("N"), "must be 1 or 2");
    if (s.has("psi")) spec.profile = parse_profile(s.raw("psi"), s.at("psi"), s.echo("psi"));
    else parse_profile(json(1.0), s.at("psi"), s.echo("psi"));
    if (spec.profile.kind == ProfileKind::Custom) schema(s.at("psi"), "custom data cannot be swept");
    as_schema(s.at("psi"), [&] {
      spec.profile.validate();
      return 0;
    });
    const bool has_beta = spec.profile.kind == ProfileKind::PowerDecay || spec.profile.kind == ProfileKind::BoundedPower;
    spec.beta = s.number("beta", has_beta ? spec.profile.beta : 0.0);
    if (spec.beta < 0.0) schema(s.at("beta"), "must be nonnegative");
    spec.r = s.exponent("r", kInfinity);
    if (s.has("regime")) spec.regime = parse_regime(s.text("regime", ""), s.at("regime"));
    else s.echo("regime") = to_string(spec.effective_regime());
    if (!s.has("lambda")) schema(s.at("lambda"), "required");
    spec.lambda_grid = parse_lambda_grid(s.raw("lambda"), s.at("lambda"), s.echo("lambda"));
    spec.grid_h = s.optional_number("grid_h");
    spec.truncation = s.optional_number("truncation");
    spec.nodes_per_diffusion_length = s.number("nodes_per_diffusion_length", spec.nodes_per_diffusion_length);
    spec.truncation_factor = s.number("truncation_factor", spec.truncation_factor);
    spec.horizon_factor = s.number("horizon_factor", spec.horizon_factor);
    spec.tolerance = s.number("tolerance", spec.tolerance);
    spec.absolute_tolerance = s.optional_number("absolute_tolerance");
    s.finish();
    spec.solver = solver;
    // Out-of-range parameters surface as hypothesis errors (exit 3).
    predicted_exponent(spec.p, spec.dimension, spec.beta, spec.effective_regime(), spec.r);
    as_schema("sweep", [&] {
      spec.validate();
      return 0;
    });
    b.sweep = spec;
  }

  if (top.has("scaling")) {
    Section s(top.raw("scaling"), "scaling", top.echo("scaling"));
    if (s.has("mu")) {
      const json& m = s.raw("mu");
      b.scaling.mu.clear();
      if (m.is_array())
        for (std::size_t i = 0; i < m.size(); ++i) b.scaling.mu.push_back(Section::as_number(m[i], s.at("mu")));
      else
        b.scaling.mu.push_back(Section::as_number(m, s.at("mu")));
      for (double mu : b.scaling.mu) positive(mu, s.at("mu"));
    }
    s.echo("mu") = b.scaling.mu;
    s.finish();
  }

  if (top.has("compare")) {
    Section s(top.raw("compare"), "compare", top.echo("compare"));
    CompareConfig c;
    if (!s.has("lower")) schema(s.at("lower"), "required");
    if (!s.has("upper")) schema(s.at("upper"), "required");
    c.lower = parse_profile(s.raw("lower"), s.at("lower"), s.echo("lower"));
    c.upper = parse_profile(s.raw("upper"), s.at("upper"), s.echo("upper"));
    s.finish();
    b.compare = c;
  }

  if (top.has("ulnorm")) {
    Section s(top.raw("ulnorm"), "ulnorm", top.echo("ulnorm"));
    UlnormConfig& u = b.ulnorm;
    if (s.has("norms")) u.norms = parse_uloc_list(s.raw("norms"), s.at("norms"), s.echo("norms"));
    if (s.has("holder_q")) u.holder_q = s.exponent("holder_q", 1.0);
    u.covering = s.boolean("covering", false);
    if (s.has("gate")) {
      Section g(s.raw("gate"), s.at("gate"), s.echo("gate"));
      u.gate = true;
      u.gate_r = g.exponent("r", 2.0);
      u.gate_rho = g.number("rho", 1.0);
      positive(u.gate_rho, g.at("rho"));
      if (g.has("gamma")) {
        const json& x = g.raw("gamma");
        if (x.is_string() && x.get<std::string>() == "calibrate") {
          g.echo("gamma") = "calibrate";
        } else {
          u.gamma = Section::as_number(x, g.at("gamma"));
          g.echo("gamma") = *u.gamma;
        }
      } else {
        g.echo("gamma") = "calibrate";
      }
      auto& cal = u.calibration;
      cal.p = p;
      cal.dimension = dimension;
      cal.r = u.gate_r;
      cal.rho = u.gate_rho;
      cal.mu = g.number("mu", cal.mu);
      cal.margin = g.number("margin", cal.margin);
      cal.h_over_rho = g.number("h_over_rho", cal.h_over_rho);
      cal.length_over_rho = g.number("length_over_rho", cal.length_over_rho);
      cal.solver = solver;
      g.finish();
      if (!(p > 1.0)) schema("p", "the smallness gate needs p > 1");
      if (!admissible_r(p, dimension, u.gate_r))
        fail(ErrorKind::HypothesisViolated, "theorem hypothesis violated: gate exponent r is not admissible for this p");
    }
    s.finish();
  }

  if (top.has("rate")) {
    Section s(top.raw("rate"), "rate", top.echo("rate"));
    if (s.has("r")) b.rate.r = parse_exponent_list(s.raw("r"), s.at("r"), s.echo("r"));
    else s.echo("r") = json::array({"inf"});
    if (s.has("window")) {
      const json& w = s.raw("window");
      if (!w.is_array() || w.size() != 2) schema(s.at("window"), "expected [lo, hi]");
      b.rate.window = {Section::as_number(w[0], s.at("window")), Section::as_number(w[1], s.at("window"))};
      if (!(b.rate.window.lo > 0.0 && b.rate.window.lo < b.rate.window.hi && b.rate.window.hi < 1.0))
        schema(s.at("window"), "need 0 < lo < hi < 1");
    }
    s.echo("window") = json::array({b.rate.window.lo, b.rate.window.hi});
    s.finish();
    if (p > 1.0)
      for (double r : b.rate.r)
        if (!rate_admissible_r(p, dimension, r))
          fail(ErrorKind::HypothesisViolated, "theorem hypothesis violated: rate exponent r below the admissible floor");
  }

  if (top.has("decay")) {
    Section s(top.raw("decay"), "decay", top.echo("decay"));
    b.decay.flat_tolerance = s.number("flat_tolerance", b.decay.flat_tolerance);
    positive(b.decay.flat_tolerance, s.at("flat_tolerance"));
    b.decay.calibrate = s.boolean("calibrate", false);
    b.decay.margin = s.number("margin", b.decay.margin);
    b.decay.calibration_horizon = s.number("calibration_horizon", 0.0);
    s.finish();
  }

  // Worker count recorded by a previous run; --jobs and ULHEAT_JOBS take precedence.
  if (top.has("jobs")) b.jobs = top.count("jobs", 1, 1);

  top.finish();
  return b;
}

ConfigBundle load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace ulheat
