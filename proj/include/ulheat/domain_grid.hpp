#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace ulheat {

enum class DomainKind { HalfLine, Interval, HalfPlane, Rectangle };

/// Box-shaped domains. For HalfLine the x-length is the truncation cutoff;
/// for HalfPlane the x-length truncates x > 0 and y spans [0, ly] as a window
/// of the full line, with both y faces artificial.
class Domain {
 public:
  static Domain half_line(double truncation);
  static Domain interval(double length);
  static Domain half_plane(double lx, double ly);
  static Domain rectangle(double lx, double ly);

  DomainKind kind() const noexcept { return kind_; }
  int dimension() const noexcept;
  bool truncated() const noexcept;
  double lx() const noexcept { return lx_; }
  double ly() const noexcept { return ly_; }

  /// Point |x| is measured from for radial profiles: the midpoint of the
  /// physical x = 0 face.
  std::array<double, 2> origin() const noexcept;

  /// Same domain with every length multiplied by `factor`.
  Domain scaled(double factor) const;

  std::string name() const;

 private:
  Domain(DomainKind kind, double lx, double ly);

  DomainKind kind_;
  double lx_;
  double ly_;
};

enum class NodeClass : std::uint8_t { Interior, PhysicalBoundary, ArtificialBoundary };

enum class Face : std::uint8_t { XLow, XHigh, YLow, YHigh };

enum class FaceKind : std::uint8_t { None, Physical, Artificial };

/// Uniform node lattice x_i = i h (and y_j = j h). Node index is j * nx + i.
class Grid {
 public:
  Grid(const Domain& domain, double h);

  const Domain& domain() const noexcept { return domain_; }
  double h() const noexcept { return h_; }
  int dimension() const noexcept { return domain_.dimension(); }
  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t size() const noexcept { return nx_ * ny_; }

  std::size_t index(std::size_t i, std::size_t j = 0) const noexcept { return j * nx_ + i; }
  std::array<double, 2> position(std::size_t index) const noexcept;
  NodeClass classify(std::size_t index) const noexcept;
  FaceKind face_kind(Face face) const noexcept;

  /// Node-count weight h^N.
  double cell_volume() const noexcept;
  /// Trapezoidal quadrature weight of a node (h^N times 1/2 per boundary face it lies on).
  double trapezoid_weight(std::size_t index) const noexcept;

 private:
  Domain domain_;
  double h_;
  std::size_t nx_;
  std::size_t ny_;
};

Grid build_grid(const Domain& domain, double h);

}  // namespace ulheat
