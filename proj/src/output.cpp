#include "ulheat/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ulheat/error.hpp"

namespace ulheat {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    fail(ErrorKind::Io, "cannot create output directory " + dir.string());
}

namespace {

std::string exponent_label(double r) { return std::isinf(r) ? "inf" : format_number(r); }

json number_json(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

}  // namespace

std::string history_csv(const SupNormHistory& history) {
  std::ostringstream out;
  out << "t,sup_norm";
  for (const auto& u : history.uloc_params())
    out << ",uloc_r" << exponent_label(u.r) << "_rho" << format_number(u.rho);
  for (double r : history.lr_exponents()) out << ",lr_r" << exponent_label(r);
  out << '\n';
  for (const auto& s : history.samples()) {
    out << format_number(s.t) << ',' << format_number(s.sup_norm);
    for (double v : s.uloc) out << ',' << format_number(v);
    for (double v : s.lr) out << ',' << format_number(v);
    out << '\n';
  }
  return out.str();
}

std::string sweep_csv(const ExponentFit& fit) {
  std::vector<SweepPoint> pts = fit.points;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  std::ostringstream out;
  out << "lambda,T_hat,T_err,h,status\n";
  for (const auto& p : pts)
    out << format_number(p.lambda) << ',' << format_number(p.t_hat) << ',' << format_number(p.t_err) << ','
        << format_number(p.h) << ',' << p.status << '\n';
  return out.str();
}

std::string snapshot_csv(const SampledField& field) {
  const Grid& g = field.grid();
  std::ostringstream out;
  out << (g.dimension() == 2 ? "x,y,u\n" : "x,u\n");
  for (std::size_t k = 0; k < field.size(); ++k) {
    const auto pos = g.position(k);
    out << format_number(pos[0]) << ',';
    if (g.dimension() == 2) out << format_number(pos[1]) << ',';
    out << format_number(field[k]) << '\n';
  }
  return out.str();
}

namespace {

constexpr double kW = 640, kH = 420, kPad = 60;

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const { return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : 0.5 * (a + b); }
};

Axis span(const std::vector<double>& v) {
  Axis a{*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
  const double pad = 0.05 * std::max(a.hi - a.lo, 1e-12);
  return {a.lo - pad, a.hi + pad};
}

std::string frame(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                  const Axis& x, const Axis& y) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\"" << kH - kPad
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
    << "\" stroke=\"black\"/>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"" << kPad / 2 << "\" text-anchor=\"middle\">" << title << "</text>\n"
    << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
    << "<text x=\"15\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 15 " << kH / 2
    << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x.lo + k * (x.hi - x.lo) / 4, yv = y.lo + k * (y.hi - y.lo) / 4;
    const double px = x.map(xv, kPad, kW - kPad), py = y.map(yv, kH - kPad, kPad);
    s << "<text x=\"" << px << "\" y=\"" << kH - kPad + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
      << format_number(std::round(xv * 100) / 100) << "</text>\n"
      << "<text x=\"" << kPad - 4 << "\" y=\"" << py + 3 << "\" font-size=\"10\" text-anchor=\"end\">"
      << format_number(std::round(yv * 100) / 100) << "</text>\n";
  }
  return s.str();
}

}  // namespace

std::string sweep_svg(const ExponentFit& fit) {
  std::vector<double> xs, ys;
  std::vector<bool> used;
  for (const auto& p : fit.points)
    if (p.t_hat > 0.0 && std::isfinite(p.t_hat)) {
      xs.push_back(sweep_abscissa(p.lambda, fit.log_correction_applied));
      ys.push_back(std::log10(p.t_hat));
      used.push_back(p.used);
    }
  std::ostringstream s;
  if (xs.empty()) {
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\"><text x=\"20\" y=\"40\">no blown-up points</text></svg>\n";
    return s.str();
  }
  for (double& x : xs) x /= std::log(10.0);
  const Axis ax = span(xs), ay = span(ys);
  s << frame("log10 T_hat vs " + std::string(fit.log_correction_applied ? "log10(lambda |log lambda|)" : "log10 lambda") +
                 ", slope " + format_number(fit.slope),
             fit.log_correction_applied ? "log10(lambda |log lambda|)" : "log10 lambda", "log10 T_hat", ax, ay);
  for (std::size_t k = 0; k < xs.size(); ++k)
    s << "<circle cx=\"" << ax.map(xs[k], kPad, kW - kPad) << "\" cy=\"" << ay.map(ys[k], kH - kPad, kPad)
      << "\" r=\"4\" fill=\"" << (used[k] ? "black" : "none") << "\" stroke=\"black\"/>\n";
  // Natural-log fit y = a + b x, drawn in base 10.
  const double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
  auto line_y = [&](double x10) { return (fit.intercept + fit.slope * x10 * std::log(10.0)) / std::log(10.0); };
  s << "<line x1=\"" << ax.map(x0, kPad, kW - kPad) << "\" y1=\"" << ay.map(line_y(x0), kH - kPad, kPad)
    << "\" x2=\"" << ax.map(x1, kPad, kW - kPad) << "\" y2=\"" << ay.map(line_y(x1), kH - kPad, kPad)
    << "\" stroke=\"red\"/>\n</svg>\n";
  return s.str();
}

std::string trace_svg(const SupNormHistory& history) {
  std::vector<double> xs, ys;
  for (const auto& smp : history.samples()) {
    xs.push_back(smp.t);
    ys.push_back(std::log10(std::max(smp.sup_norm, 1e-300)));
  }
  if (xs.empty()) xs = ys = {0.0};
  const Axis ax = span(xs), ay = span(ys);
  std::ostringstream s;
  s << frame("sup norm trace", "t", "log10 sup|u|", ax, ay) << "<polyline fill=\"none\" stroke=\"blue\" points=\"";
  // Thin very long traces to at most ~2000 vertices.
  const std::size_t step = std::max<std::size_t>(1, xs.size() / 2000);
  for (std::size_t k = 0; k < xs.size(); k += step)
    s << ax.map(xs[k], kPad, kW - kPad) << ',' << ay.map(ys[k], kH - kPad, kPad) << ' ';
  s << ax.map(xs.back(), kPad, kW - kPad) << ',' << ay.map(ys.back(), kH - kPad, kPad) << "\"/>\n</svg>\n";
  return s.str();
}

json to_json(const BlowupReport& r) {
  return json{{"status", r.status == RunStatus::BlownUp ? "blown_up" : "global_by_horizon"},
              {"T_hat", number_json(r.t_hat)},
              {"T_bracket", json::array({number_json(r.t_bracket[0]), number_json(r.t_bracket[1])})},
              {"fit_r2", number_json(r.fit_r2)},
              {"T_hat_spread", number_json(r.t_hat_spread)},
              {"grid_h", r.grid_h},
              {"t_end", r.t_end},
              {"steps", r.steps},
              {"extrapolated", r.extrapolated},
              {"low_confidence", r.low_confidence}};
}

json to_json(const ExponentFit& f) {
  json pts = json::array();
  for (const auto& p : f.points)
    pts.push_back({{"lambda", p.lambda},
                   {"T_hat", number_json(p.t_hat)},
                   {"T_err", number_json(p.t_err)},
                   {"h", p.h},
                   {"L", p.length},
                   {"fit_r2", number_json(p.fit_r2)},
                   {"status", p.status},
                   {"used", p.used}});
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"stderr", f.stderr_},
              {"uncorrected_slope", f.uncorrected_slope},
              {"uncorrected_stderr", f.uncorrected_stderr},
              {"expected_exponent", f.expected_exponent},
              {"log_correction_applied", f.log_correction_applied},
              {"widened", f.widened},
              {"pass", f.pass},
              {"reference", {{"lambda", f.reference_lambda}, {"h", f.reference_h}, {"L", f.reference_length},
                             {"T", f.reference_time}}},
              {"truncation_check", {{"relative_change", number_json(f.truncation_change)}, {"pass", f.truncation_ok}}},
              {"points", pts}};
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  out.close();
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

void write_report(const std::filesystem::path& dir, const std::string& command, const json& config,
                  const json& results, double wall_seconds) {
  const json doc{{"tool", kToolVersion},
                 {"command", command},
                 {"config", config},
                 {"wall_clock_seconds", wall_seconds},
                 {"results", results}};
  write_text(dir, "report.json", doc.dump(2) + "\n");
}

}  // namespace ulheat
