#include "ulheat/domain_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ulheat/error.hpp"
#include "ulheat/field.hpp"
#include "ulheat/initial_data.hpp"

namespace ulheat {

namespace {

constexpr std::size_t kMinNodesPerAxis = 5;

std::size_t nodes_along(double length, double h, const char* axis) {
  const double intervals = length / h;
  const double rounded = std::round(intervals);
  if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, intervals)) {
    std::ostringstream msg;
    msg << "grid spacing " << h << " does not divide " << axis << "-length " << length;
    fail(msg.str());
  }
  const auto count = static_cast<std::size_t>(rounded) + 1;
  if (count < kMinNodesPerAxis) {
    std::ostringstream msg;
    msg << "grid spacing " << h << " too large: " << count << " nodes along " << axis
        << " (minimum " << kMinNodesPerAxis << ")";
    fail(msg.str());
  }
  return count;
}

}  // namespace

Domain::Domain(DomainKind kind, double lx, double ly) : kind_(kind), lx_(lx), ly_(ly) {
  if (!(lx > 0.0) || !std::isfinite(lx)) fail("domain length must be positive and finite");
  if (dimension() == 2 && (!(ly > 0.0) || !std::isfinite(ly)))
    fail("domain y-length must be positive and finite");
}

Domain Domain::half_line(double truncation) { return {DomainKind::HalfLine, truncation, 0.0}; }
Domain Domain::interval(double length) { return {DomainKind::Interval, length, 0.0}; }
Domain Domain::half_plane(double lx, double ly) { return {DomainKind::HalfPlane, lx, ly}; }
Domain Domain::rectangle(double lx, double ly) { return {DomainKind::Rectangle, lx, ly}; }

int Domain::dimension() const noexcept {
  return (kind_ == DomainKind::HalfLine || kind_ == DomainKind::Interval) ? 1 : 2;
}

bool Domain::truncated() const noexcept {
  return kind_ == DomainKind::HalfLine || kind_ == DomainKind::HalfPlane;
}

std::array<double, 2> Domain::origin() const noexcept {
  if (dimension() == 1) return {0.0, 0.0};
  return {0.0, 0.5 * ly_};
}

Domain Domain::scaled(double factor) const {
  if (!(factor > 0.0)) fail("domain scale factor must be positive");
  return {kind_, lx_ * factor, ly_ * factor};
}

std::string Domain::name() const {
  switch (kind_) {
    case DomainKind::HalfLine: return "halfline";
    case DomainKind::Interval: return "interval";
    case DomainKind::HalfPlane: return "halfplane";
    case DomainKind::Rectangle: return "rectangle";
  }
  return "unknown";
}

Grid::Grid(const Domain& domain, double h) : domain_(domain), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) fail("grid spacing must be positive");
  nx_ = nodes_along(domain.lx(), h, "x");
  ny_ = domain.dimension() == 2 ? nodes_along(domain.ly(), h, "y") : 1;
}

std::array<double, 2> Grid::position(std::size_t index) const noexcept {
  const std::size_t i = index % nx_;
  const std::size_t j = index / nx_;
  return {static_cast<double>(i) * h_, static_cast<double>(j) * h_};
}

FaceKind Grid::face_kind(Face face) const noexcept {
  switch (domain_.kind()) {
    case DomainKind::HalfLine:
      if (face == Face::XLow) return FaceKind::Physical;
      if (face == Face::XHigh) return FaceKind::Artificial;
      return FaceKind::None;
    case DomainKind::Interval:
      return (face == Face::XLow || face == Face::XHigh) ? FaceKind::Physical : FaceKind::None;
    case DomainKind::HalfPlane:
      return face == Face::XLow ? FaceKind::Physical : FaceKind::Artificial;
    case DomainKind::Rectangle:
      return FaceKind::Physical;
  }
  return FaceKind::None;
}

NodeClass Grid::classify(std::size_t index) const noexcept {
  const std::size_t i = index % nx_;
  const std::size_t j = index / nx_;
  bool physical = false;
  bool artificial = false;
  auto mark = [&](bool on_face, Face face) {
    if (!on_face) return;
    const FaceKind kind = face_kind(face);
    physical |= kind == FaceKind::Physical;
    artificial |= kind == FaceKind::Artificial;
  };
  mark(i == 0, Face::XLow);
  mark(i + 1 == nx_, Face::XHigh);
  if (dimension() == 2) {
    mark(j == 0, Face::YLow);
    mark(j + 1 == ny_, Face::YHigh);
  }
  if (physical) return NodeClass::PhysicalBoundary;
  if (artificial) return NodeClass::ArtificialBoundary;
  return NodeClass::Interior;
}

double Grid::cell_volume() const noexcept { return dimension() == 2 ? h_ * h_ : h_; }

double Grid::trapezoid_weight(std::size_t index) const noexcept {
  const std::size_t i = index % nx_;
  const std::size_t j = index / nx_;
  double w = cell_volume();
  if (i == 0 || i + 1 == nx_) w *= 0.5;
  if (dimension() == 2 && (j == 0 || j + 1 == ny_)) w *= 0.5;
  return w;
}

Grid build_grid(const Domain& domain, double h) { return Grid(domain, h); }

// ---------------------------------------------------------------------------
// Initial data

InitialData InitialData::constant(double lambda) {
  InitialData d;
  d.kind = ProfileKind::Constant;
  d.lambda = lambda;
  return d;
}

InitialData InitialData::power_decay(double lambda, double beta, double delta) {
  InitialData d;
  d.kind = ProfileKind::PowerDecay;
  d.lambda = lambda;
  d.beta = beta;
  d.delta = delta;
  return d;
}

InitialData InitialData::bounded_power(double lambda, double beta) {
  InitialData d;
  d.kind = ProfileKind::BoundedPower;
  d.lambda = lambda;
  d.beta = beta;
  return d;
}

InitialData InitialData::gaussian(double lambda, double width) {
  InitialData d;
  d.kind = ProfileKind::Gaussian;
  d.lambda = lambda;
  d.width = width;
  return d;
}

InitialData InitialData::custom_values(std::vector<double> values) {
  InitialData d;
  d.kind = ProfileKind::Custom;
  d.custom = std::move(values);
  return d;
}

void InitialData::validate() const {
  if (!std::isfinite(lambda)) fail("initial data lambda must be finite");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("initial data beta must be >= 0");
  if (kind == ProfileKind::PowerDecay && !(delta > 0.0)) fail("power_decay delta must be > 0");
  if (kind == ProfileKind::Gaussian && !(width > 0.0)) fail("gaussian width must be > 0");
}

double InitialData::shape(double radius) const {
  switch (kind) {
    case ProfileKind::Constant: return 1.0;
    case ProfileKind::PowerDecay:
      if (radius >= delta) return 0.0;
      return beta == 0.0 ? 1.0 : std::pow(radius, -beta);
    case ProfileKind::BoundedPower: return std::pow(1.0 + radius, -beta);
    case ProfileKind::Gaussian: return std::exp(-(radius * radius) / (width * width));
    case ProfileKind::Custom: break;
  }
  fail("custom profiles have no analytic shape");
}

double InitialData::support_radius() const noexcept {
  return kind == ProfileKind::PowerDecay ? delta : std::numeric_limits<double>::infinity();
}

std::string InitialData::name() const {
  switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::PowerDecay: return "power_decay";
    case ProfileKind::BoundedPower: return "bounded_power";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

// Integral of psi over [a, b] along a ray from the origin (1D).
double shape_integral_1d(const InitialData& d, double a, double b) {
  if (b <= a) return 0.0;
  switch (d.kind) {
    case ProfileKind::Constant: return b - a;
    case ProfileKind::PowerDecay: {
      b = std::min(b, d.delta);
      if (b <= a) return 0.0;
      if (d.beta == 1.0) return std::log(b / a);
      return (std::pow(b, 1.0 - d.beta) - std::pow(a, 1.0 - d.beta)) / (1.0 - d.beta);
    }
    case ProfileKind::BoundedPower:
      if (d.beta == 1.0) return std::log1p(b) - std::log1p(a);
      return (std::pow(1.0 + b, 1.0 - d.beta) - std::pow(1.0 + a, 1.0 - d.beta)) / (1.0 - d.beta);
    case ProfileKind::Gaussian: {
      const double w = d.width;
      return 0.5 * std::sqrt(std::numbers::pi) * w * (std::erf(b / w) - std::erf(a / w));
    }
    case ProfileKind::Custom: break;
  }
  fail("custom profiles have no analytic shape");
}

// Mean of |x|^-beta over the ball of radius h about the singular origin node.
double singular_ball_average(double beta, double h, int dim) {
  if (beta >= dim) fail("non-integrable singularity at this grid");
  return dim * std::pow(h, -beta) / (dim - beta);
}

double cell_average_2d(const InitialData& d, const Grid& grid, std::size_t idx) {
  // 4x4 Gauss-Legendre over the dual cell clipped to the domain.
  static constexpr double kNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
  static constexpr double kWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};
  const auto pos = grid.position(idx);
  const auto origin = grid.domain().origin();
  const double h = grid.h();
  const double x0 = std::max(0.0, pos[0] - 0.5 * h), x1 = std::min(grid.domain().lx(), pos[0] + 0.5 * h);
  const double y0 = std::max(0.0, pos[1] - 0.5 * h), y1 = std::min(grid.domain().ly(), pos[1] + 0.5 * h);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * kNodes[a];
      const double y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * kNodes[b];
      const double radius = std::hypot(x - origin[0], y - origin[1]);
      acc += 0.25 * kWeights[a] * kWeights[b] * d.shape(radius);
    }
  }
  return acc;
}

}  // namespace

SampledField sample_initial(const InitialData& data, const Grid& grid, Sampling sampling) {
  data.validate();
  std::vector<double> values(grid.size());
  if (data.kind == ProfileKind::Custom) {
    if (data.custom.size() != grid.size()) fail("custom initial data size does not match the grid");
    for (std::size_t k = 0; k < values.size(); ++k) values[k] = data.lambda * data.custom[k];
    return SampledField(grid, std::move(values));
  }

  const int dim = grid.dimension();
  const double h = grid.h();
  const auto origin = grid.domain().origin();
  const bool singular = data.kind == ProfileKind::PowerDecay && data.beta > 0.0;
  if (singular && data.beta >= dim) fail("non-integrable singularity at this grid");

  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto pos = grid.position(k);
    const double radius = std::hypot(pos[0] - origin[0], pos[1] - origin[1]);
    double psi = 0.0;
    if (sampling == Sampling::CellAverage && dim == 1) {
      const double a = std::max(0.0, pos[0] - 0.5 * h);
      const double b = std::min(grid.domain().lx(), pos[0] + 0.5 * h);
      psi = shape_integral_1d(data, a, b) / (b - a);
    } else if (singular && radius < 0.5 * h) {
      psi = sampling == Sampling::CellAverage ? singular_ball_average(data.beta, 0.5 * h, dim)
                                              : singular_ball_average(data.beta, h, dim);
    } else if (sampling == Sampling::CellAverage) {
      psi = cell_average_2d(data, grid, k);
    } else {
      psi = data.shape(radius);
    }
    values[k] = data.lambda * psi;
  }
  return SampledField(grid, std::move(values));
}

}  // namespace ulheat
