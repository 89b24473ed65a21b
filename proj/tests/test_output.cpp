#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ulheat/error.hpp"
#include "ulheat/output.hpp"

using namespace ulheat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ExponentFit fake_fit() {
  ExponentFit f;
  f.slope = -2.0;
  f.expected_exponent = -2.0;
  f.pass = true;
  for (double l : {64.0, 4.0, 16.0, 8.0, 32.0}) {
    SweepPoint p;
    p.lambda = l;
    p.t_hat = 0.18 / (l * l);
    p.t_err = 1e-9;
    p.h = 0.01 / l;
    p.status = "blown_up";
    p.used = true;
    f.points.push_back(p);
  }
  SweepPoint g;
  g.lambda = 2.0;
  g.status = "global_by_horizon";
  f.points.push_back(g);
  return f;
}

}  // namespace

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(123456789012345.0), "1.23456789012e+14");
  EXPECT_EQ(format_number(INFINITY), "inf");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(format_number(NAN), "nan");
}

TEST(Csv, HistoryHeaderAndRows) {
  SupNormHistory h({{2.0, 1.0}, {INFINITY, 0.5}}, {2.0, INFINITY});
  h.append({0.0, 1.0, {1.5, 1.0}, {2.0, 1.0}});
  h.append({0.25, 2.0, {2.5, 2.0}, {3.0, 2.0}});
  const auto l = lines(history_csv(h));
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "t,sup_norm,uloc_r2_rho1,uloc_rinf_rho0.5,lr_r2,lr_rinf");
  EXPECT_EQ(l[2], "0.25,2,2.5,2,3,2");
  EXPECT_EQ(lines(history_csv(SupNormHistory{})).front(), "t,sup_norm");
}

TEST(Csv, SweepSortedWithStatus) {
  const auto l = lines(sweep_csv(fake_fit()));
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[0], "lambda,T_hat,T_err,h,status");
  EXPECT_EQ(l[1], "2,nan,nan,0,global_by_horizon");
  EXPECT_EQ(l[2].substr(0, 2), "4,");
  EXPECT_EQ(l[6].substr(0, 3), "64,");
  EXPECT_NE(l[6].find(",blown_up"), std::string::npos);
}

TEST(Csv, Snapshots) {
  const Grid g1(Domain::half_line(1.0), 0.25);
  const auto a = lines(snapshot_csv(SampledField(g1, 2.0)));
  ASSERT_EQ(a.size(), 6u);
  EXPECT_EQ(a[0], "x,u");
  EXPECT_EQ(a[2], "0.25,2");
  const Grid g2(Domain::half_plane(1.0, 1.0), 0.25);
  const auto b = lines(snapshot_csv(SampledField(g2, 1.0)));
  EXPECT_EQ(b.size(), 26u);
  EXPECT_EQ(b[0], "x,y,u");
}

TEST(Svg, WellFormedRoot) {
  const std::string s = sweep_svg(fake_fit());
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  SupNormHistory h;
  for (int k = 0; k < 10; ++k) h.append({0.1 * k, 1.0 + k, {}, {}});
  const std::string t = trace_svg(h);
  EXPECT_EQ(t.rfind("<svg", 0), 0u);
  EXPECT_NE(t.find("</svg>"), std::string::npos);
  EXPECT_NO_THROW(trace_svg(SupNormHistory{}));
}

TEST(Json, Report) {
  BlowupReport r;
  r.status = RunStatus::GlobalByHorizon;
  r.t_end = 1.0;
  const json j = to_json(r);
  EXPECT_EQ(j.at("status"), "global_by_horizon");
  EXPECT_EQ(j.at("T_hat"), "nan");
  const json f = to_json(fake_fit());
  EXPECT_EQ(f.at("points").size(), 6u);
  EXPECT_TRUE(f.at("pass").get<bool>());
}

TEST(Files, WriteAndIoErrors) {
  const fs::path dir = fs::temp_directory_path() / ("ulheat_out_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  ensure_output_dir(dir / "nested");
  write_text(dir / "nested", "a.txt", "hello\n");
  std::ifstream in(dir / "nested" / "a.txt");
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "hello");
  write_report(dir, "solve", json{{"p", 2}}, json{{"x", 1}}, 0.5);
  std::ifstream rep(dir / "report.json");
  const json doc = json::parse(rep);
  EXPECT_EQ(doc.at("tool"), kToolVersion);
  EXPECT_EQ(doc.at("command"), "solve");
  EXPECT_EQ(doc.at("config").at("p"), 2);
  EXPECT_DOUBLE_EQ(doc.at("wall_clock_seconds").get<double>(), 0.5);
  EXPECT_EQ(doc.at("results").at("x"), 1);
  fs::remove_all(dir);

  try {
    ensure_output_dir("/proc/ulheat_no_such_dir");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
  EXPECT_THROW(write_text("/proc/ulheat_no_such_dir", "a.txt", "x"), Error);
}
