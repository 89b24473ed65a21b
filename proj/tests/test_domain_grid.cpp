#include <gtest/gtest.h>

#include <cmath>

#include "ulheat/domain_grid.hpp"
#include "ulheat/error.hpp"
#include "ulheat/field.hpp"
#include "ulheat/initial_data.hpp"

using namespace ulheat;

TEST(Grid, IntervalEndpointsArePhysical) {
  const Grid g(Domain::interval(1.0), 0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.classify(0), NodeClass::PhysicalBoundary);
  EXPECT_EQ(g.classify(4), NodeClass::PhysicalBoundary);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(g.classify(i), NodeClass::Interior);
  EXPECT_FALSE(g.domain().truncated());
}

TEST(Grid, HalfLineTruncation) {
  const Grid g = build_grid(Domain::half_line(10.0), 0.1);
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g.classify(0), NodeClass::PhysicalBoundary);
  EXPECT_EQ(g.classify(100), NodeClass::ArtificialBoundary);
  EXPECT_EQ(g.classify(50), NodeClass::Interior);
  EXPECT_DOUBLE_EQ(g.position(100)[0], 10.0);
  EXPECT_TRUE(g.domain().truncated());
}

TEST(Grid, HalfPlaneFaces) {
  const Grid g(Domain::half_plane(4.0, 4.0), 0.5);
  ASSERT_EQ(g.nx(), 9u);
  ASSERT_EQ(g.ny(), 9u);
  EXPECT_EQ(g.face_kind(Face::XLow), FaceKind::Physical);
  EXPECT_EQ(g.face_kind(Face::XHigh), FaceKind::Artificial);
  EXPECT_EQ(g.face_kind(Face::YLow), FaceKind::Artificial);
  EXPECT_EQ(g.face_kind(Face::YHigh), FaceKind::Artificial);
  // Physical wins at the corners of x = 0.
  EXPECT_EQ(g.classify(g.index(0, 0)), NodeClass::PhysicalBoundary);
  EXPECT_EQ(g.classify(g.index(0, 8)), NodeClass::PhysicalBoundary);
  EXPECT_EQ(g.classify(g.index(8, 4)), NodeClass::ArtificialBoundary);
  EXPECT_EQ(g.classify(g.index(4, 0)), NodeClass::ArtificialBoundary);
  EXPECT_EQ(g.classify(g.index(4, 4)), NodeClass::Interior);
}

TEST(Grid, RectangleAllPhysical) {
  const Grid g(Domain::rectangle(1.0, 2.0), 0.25);
  EXPECT_EQ(g.nx(), 5u);
  EXPECT_EQ(g.ny(), 9u);
  std::size_t artificial = 0;
  for (std::size_t k = 0; k < g.size(); ++k) artificial += g.classify(k) == NodeClass::ArtificialBoundary;
  EXPECT_EQ(artificial, 0u);
}

TEST(Grid, ClassificationIsPartition) {
  for (const Domain& d : {Domain::half_line(3.0), Domain::interval(3.0), Domain::half_plane(3.0, 2.0),
                          Domain::rectangle(3.0, 2.0)}) {
    const Grid g(d, 0.25);
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t k = 0; k < g.size(); ++k) ++counts[static_cast<int>(g.classify(k))];
    EXPECT_EQ(counts[0] + counts[1] + counts[2], g.size()) << d.name();
    EXPECT_GT(counts[1], 0u) << d.name();
    if (!d.truncated()) EXPECT_EQ(counts[2], 0u) << d.name();
  }
}

TEST(Grid, RefinementSharesNodes) {
  const Grid coarse(Domain::half_plane(2.0, 1.0), 0.25);
  const Grid fine(Domain::half_plane(2.0, 1.0), 0.125);
  for (std::size_t j = 0; j < coarse.ny(); ++j)
    for (std::size_t i = 0; i < coarse.nx(); ++i) {
      const auto a = coarse.position(coarse.index(i, j));
      const auto b = fine.position(fine.index(2 * i, 2 * j));
      EXPECT_DOUBLE_EQ(a[0], b[0]);
      EXPECT_DOUBLE_EQ(a[1], b[1]);
      EXPECT_EQ(coarse.classify(coarse.index(i, j)), fine.classify(fine.index(2 * i, 2 * j)));
    }
}

TEST(Grid, Rejections) {
  EXPECT_THROW(Grid(Domain::half_line(1.0), 0.3), Error);   // does not divide
  EXPECT_THROW(Grid(Domain::half_line(1.0), 0.5), Error);   // too few nodes
  EXPECT_THROW(Grid(Domain::half_line(1.0), -0.1), Error);
  EXPECT_THROW(Domain::half_line(0.0), Error);
  EXPECT_THROW(Domain::rectangle(1.0, -1.0), Error);
  EXPECT_NO_THROW(Grid(Domain::half_line(1.0), 0.1 + 1e-12));
}

TEST(Grid, TrapezoidWeightsIntegrateLength) {
  const Grid g(Domain::half_plane(2.0, 3.0), 0.25);
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) total += g.trapezoid_weight(k);
  EXPECT_NEAR(total, 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0625);
}

TEST(Field, RejectsNonFinite) {
  const Grid g(Domain::half_line(1.0), 0.1);
  std::vector<double> v(g.size(), 1.0);
  v[3] = std::nan("");
  EXPECT_THROW(SampledField(g, v), Error);
  v[3] = INFINITY;
  EXPECT_THROW(SampledField(g, v), Error);
  EXPECT_THROW(SampledField(g, std::vector<double>(3, 0.0)), Error);
}

TEST(Field, Norms) {
  const Grid g(Domain::half_line(2.0), 0.01);
  const SampledField one(g, 1.0);
  EXPECT_NEAR(one.mass(), 2.0, 1e-12);
  EXPECT_NEAR(one.lr_norm(2.0), std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(one.lr_norm(INFINITY), 1.0);
  EXPECT_DOUBLE_EQ(one.scaled(-3.0).sup_norm(), 3.0);
}

TEST(Sampling, ConstantIsOnes) {
  const Grid g(Domain::half_plane(1.0, 1.0), 0.125);
  const SampledField f = sample_initial(InitialData::constant(1.0), g);
  for (double v : f.values()) EXPECT_EQ(v, 1.0);
}

TEST(Sampling, BoundedPowerNodeValue) {
  const Grid g(Domain::half_line(4.0), 0.5);
  const SampledField f = sample_initial(InitialData::bounded_power(1.0, 1.0), g);
  EXPECT_DOUBLE_EQ(f[4], 1.0 / 3.0);
}

TEST(Sampling, PowerDecayNodeValue) {
  const Grid g(Domain::half_line(2.0), 0.25);
  const SampledField f = sample_initial(InitialData::power_decay(1.0, 0.5, 1.0), g);
  EXPECT_DOUBLE_EQ(f[1], 2.0);
  // Outside the support.
  EXPECT_EQ(f[6], 0.0);
}

TEST(Sampling, SingularNodeIsBallAverage) {
  const double h = 0.01, beta = 0.5;
  const Grid g(Domain::half_line(1.0), h);
  const SampledField f = sample_initial(InitialData::power_decay(2.0, beta, 1.0), g);
  // (1/h) int_0^h 2 x^-beta dx
  EXPECT_NEAR(f[0], 2.0 * std::pow(h, -beta) / (1.0 - beta), 1e-12);
  EXPECT_THROW(sample_initial(InitialData::power_decay(1.0, 1.0, 1.0), g), Error);
}

TEST(Sampling, ScaleEquivariant) {
  const Grid g(Domain::half_plane(2.0, 2.0), 0.125);
  for (const InitialData& d : {InitialData::gaussian(1.0, 0.5), InitialData::bounded_power(1.0, 1.5),
                               InitialData::power_decay(1.0, 0.5, 1.0)}) {
    InitialData scaled = d;
    scaled.lambda = 3.5;
    const SampledField a = sample_initial(d, g), b = sample_initial(scaled, g);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(b[k], 3.5 * a[k]) << d.name();
  }
}

TEST(Sampling, CellAverageConservesMass) {
  // Coarse grid, narrow bump: cell averages keep the mass that point values lose.
  const Grid g(Domain::half_line(40.0), 2.0);
  const SampledField f = sample_initial(InitialData::gaussian(1.0, 1.0), g, Sampling::CellAverage);
  double mass = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) mass += f[k] * (k == 0 || k + 1 == g.size() ? 1.0 : 2.0);
  EXPECT_NEAR(mass, 0.5 * std::sqrt(M_PI), 1e-10);  // dual cells: h/2 at ends, h inside
}

TEST(Sampling, CellAverageSingularOrigin) {
  const double h = 0.1, beta = 0.5, delta = 1.0;
  const Grid g(Domain::half_line(2.0), h);
  const SampledField f = sample_initial(InitialData::power_decay(1.0, beta, delta), g, Sampling::CellAverage);
  // Dual cell [0, h/2]: mean of x^-beta.
  EXPECT_NEAR(f[0], std::pow(0.5 * h, -beta) / (1.0 - beta), 1e-12);
  // Cell mass sums to int_0^delta x^-beta dx.
  double mass = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) mass += f[k] * (k == 0 ? 0.5 * h : h);
  EXPECT_NEAR(mass, std::pow(delta, 1.0 - beta) / (1.0 - beta), 1e-12);
}

TEST(InitialData, Validation) {
  EXPECT_THROW(InitialData::power_decay(1.0, -1.0, 1.0).validate(), Error);
  EXPECT_THROW(InitialData::power_decay(1.0, 0.5, 0.0).validate(), Error);
  EXPECT_THROW(InitialData::gaussian(1.0, 0.0).validate(), Error);
  EXPECT_TRUE(std::isinf(InitialData::bounded_power(1.0, 2.0).support_radius()));
  EXPECT_DOUBLE_EQ(InitialData::power_decay(1.0, 0.5, 3.0).support_radius(), 3.0);
}
