#include "ulheat/uloc_norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ulheat/error.hpp"

namespace ulheat {

namespace {

void check_params(const SampledField& f, double r, double rho) {
  if (f.size() == 0) fail("uniformly local norm of an empty field");
  if (!(r >= 1.0)) fail("uniformly local norm needs r >= 1");
  if (!(rho > 0.0)) fail("uniformly local norm needs rho > 0");
  if (rho < 2.0 * f.h() * (1.0 - 1e-12)) fail("ball under-resolved: rho must be at least 2h");
}

// Largest integer offset k with k * h strictly inside rho (open ball).
std::ptrdiff_t ball_reach(double rho, double h) {
  // Shrink by a relative 1e-12 so nodes at distance rho (up to rounding in
  // rho / h) stay outside the open ball.
  return static_cast<std::ptrdiff_t>(std::ceil(rho / h * (1.0 - 1e-12))) - 1;
}

}  // namespace

double unit_ball_measure(int dimension) {
  if (dimension == 1) return 2.0;
  if (dimension == 2) return std::numbers::pi;
  fail("unsupported dimension");
}

std::vector<double> uloc_ball_integrals(const SampledField& f, double r, double rho) {
  check_params(f, r, rho);
  const Grid& grid = f.grid();
  const double h = grid.h();
  const auto nx = static_cast<std::ptrdiff_t>(grid.nx());
  const auto ny = static_cast<std::ptrdiff_t>(grid.ny());
  const auto values = f.values();
  const double weight = grid.cell_volume();

  // Row-wise prefix sums of |f|^r in extended precision.
  std::vector<long double> prefix(static_cast<std::size_t>((nx + 1) * ny));
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    long double acc = 0.0L;
    prefix[static_cast<std::size_t>(j * (nx + 1))] = 0.0L;
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      const double v = std::abs(values[static_cast<std::size_t>(j * nx + i)]);
      acc += r == 1.0 ? v : (r == 2.0 ? v * v : std::pow(v, r));
      prefix[static_cast<std::size_t>(j * (nx + 1) + i + 1)] = acc;
    }
  }
  auto row_sum = [&](std::ptrdiff_t j, std::ptrdiff_t lo, std::ptrdiff_t hi) {
    lo = std::max<std::ptrdiff_t>(lo, 0);
    hi = std::min<std::ptrdiff_t>(hi, nx - 1);
    if (hi < lo) return 0.0L;
    const auto base = static_cast<std::size_t>(j * (nx + 1));
    return prefix[base + static_cast<std::size_t>(hi + 1)] - prefix[base + static_cast<std::size_t>(lo)];
  };

  const std::ptrdiff_t reach = ball_reach(rho, h);
  // Half-width of the ball's row at vertical offset dj.
  std::vector<std::ptrdiff_t> half_width(static_cast<std::size_t>(reach + 1));
  const double ratio2 = (rho / h) * (rho / h) * (1.0 - 1e-12);
  for (std::ptrdiff_t dj = 0; dj <= reach; ++dj) {
    std::ptrdiff_t k = reach;
    while (k >= 0 && static_cast<double>(k * k + dj * dj) >= ratio2) --k;
    half_width[static_cast<std::size_t>(dj)] = k;
  }

  std::vector<double> out(grid.size());
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      long double acc = 0.0L;
      if (ny == 1) {
        acc = row_sum(0, i - reach, i + reach);
      } else {
        for (std::ptrdiff_t dj = -reach; dj <= reach; ++dj) {
          const std::ptrdiff_t row = j + dj;
          if (row < 0 || row >= ny) continue;
          const std::ptrdiff_t w = half_width[static_cast<std::size_t>(std::abs(dj))];
          if (w >= 0) acc += row_sum(row, i - w, i + w);
        }
      }
      out[static_cast<std::size_t>(j * nx + i)] = static_cast<double>(acc) * weight;
    }
  }
  return out;
}

double uloc_norm(const SampledField& f, const UlocParams& params) {
  if (f.size() == 0) fail("uniformly local norm of an empty field");
  if (std::isinf(params.r)) return f.sup_norm();
  const auto integrals = uloc_ball_integrals(f, params.r, params.rho);
  const double peak = std::max(0.0, *std::max_element(integrals.begin(), integrals.end()));
  return std::pow(peak, 1.0 / params.r);
}

BoundPair holder_embedding_bound(const SampledField& f, double r, double q, double rho) {
  if (!(r >= 1.0) || !(q >= r) || std::isinf(q)) fail("holder embedding needs 1 <= r <= q < infinity");
  const int dim = f.dimension();
  const double ball = unit_ball_measure(dim) * std::pow(rho, dim);
  BoundPair out;
  out.lhs = uloc_norm(f, {r, rho});
  out.rhs = std::pow(ball, 1.0 / r - 1.0 / q) * uloc_norm(f, {q, rho});
  return out;
}

std::vector<double> vanishing_small_rho(const SampledField& f, double r,
                                        std::span<const double> rho_sequence) {
  std::vector<double> out;
  out.reserve(rho_sequence.size());
  for (double rho : rho_sequence) out.push_back(uloc_norm(f, {r, rho}));
  return out;
}

CoverSpec covering_centers(int dimension, double rho) {
  if (dimension != 1 && dimension != 2) fail("covering_centers supports N = 1 and N = 2 only");
  if (!(rho > 0.0)) fail("covering_centers needs rho > 0");
  CoverSpec cover;
  cover.dimension = dimension;
  cover.rho = rho;
  // Offset lattice of spacing 1/2: {+-0.25, +-0.75, +-1.25, +-1.75}^N, kept
  // when inside B(0, 2.25).
  constexpr double kCoords[8] = {-1.75, -1.25, -0.75, -0.25, 0.25, 0.75, 1.25, 1.75};
  if (dimension == 1) {
    for (double x : kCoords) cover.centers.push_back({x, 0.0});
  } else {
    for (double y : kCoords)
      for (double x : kCoords)
        if (std::hypot(x, y) < 2.25) cover.centers.push_back({x, y});
  }
  return cover;
}

namespace {

double radical_inverse(std::size_t index, std::size_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

}  // namespace

bool cover_certified(const CoverSpec& cover, std::size_t probes) {
  std::size_t accepted = 0;
  for (std::size_t k = 1; accepted < probes; ++k) {
    // Halton points mapped from [0,1]^N to [-2,2]^N, rejected outside B(0,2).
    std::array<double, 2> p{4.0 * radical_inverse(k, 2) - 2.0,
                            cover.dimension == 2 ? 4.0 * radical_inverse(k, 3) - 2.0 : 0.0};
    if (std::hypot(p[0], p[1]) >= 2.0) continue;
    ++accepted;
    bool covered = false;
    for (const auto& c : cover.centers) {
      if (std::hypot(p[0] - c[0], p[1] - c[1]) < cover.radius) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

BoundPair covering_inequality_check(const SampledField& f, double r, double rho) {
  const auto m = static_cast<double>(covering_centers(f.dimension(), rho).count());
  BoundPair out;
  out.lhs = std::pow(uloc_norm(f, {r, 2.0 * rho}), r);
  out.rhs = m * std::pow(uloc_norm(f, {r, rho}), r);
  return out;
}

double psi_history(const SupNormHistory& history, const UlocParams& params, double t) {
  const std::size_t column = history.uloc_column(params);
  bool any = false;
  double running = 0.0;
  for (const auto& s : history.samples()) {
    if (s.t > t) break;
    any = true;
    const double value = std::isinf(params.r) ? s.uloc[column] : std::pow(s.uloc[column], params.r);
    running = std::max(running, value);
  }
  if (!any) fail("psi_history: no samples at or before the requested time");
  return running;
}

}  // namespace ulheat
