#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ulheat/field.hpp"
#include "ulheat/history.hpp"

namespace ulheat {

/// Discrete uniformly local norm
///
///   ||f||_{r,rho} = max over nodes c of ( sum_{|y - c| < rho} |f(y)|^r h^N )^{1/r}
///
/// Centers range over every grid node including boundary nodes; a node y is in
/// the ball iff it lies in the open ball, each node carries weight h^N. For
/// r = infinity the result is max |f| and rho is ignored.
///
/// Throws when rho < 2h ("ball under-resolved") or the field is empty.
double uloc_norm(const SampledField& f, const UlocParams& params);

/// sum_{|y - c| < rho} |f(y)|^r h^N for every center c (node order).
std::vector<double> uloc_ball_integrals(const SampledField& f, double r, double rho);

/// Measure of the unit ball: 2 for N = 1, pi for N = 2.
double unit_ball_measure(int dimension);

struct BoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = ||f||_{r,rho}, rhs = (omega_N rho^N)^{1/r - 1/q} ||f||_{q,rho}; needs 1 <= r <= q < inf.
BoundPair holder_embedding_bound(const SampledField& f, double r, double q, double rho);

/// ||f||_{r,rho_k} for each radius.
std::vector<double> vanishing_small_rho(const SampledField& f, double r,
                                        std::span<const double> rho_sequence);

/// Lattice cover of B(0,2) by balls of radius 1/2 (normalized by rho).
struct CoverSpec {
  int dimension = 1;
  std::vector<std::array<double, 2>> centers;
  double radius = 0.5;
  double rho = 1.0;

  std::size_t count() const noexcept { return centers.size(); }
};

CoverSpec covering_centers(int dimension, double rho = 1.0);

/// True when each of `probes` low-discrepancy points of B(0,2) lies in some
/// cover ball.
bool cover_certified(const CoverSpec& cover, std::size_t probes = 10000);

/// lhs = ||f||_{r,2 rho}^r, rhs = M ||f||_{r,rho}^r with M = covering_centers(N).count().
BoundPair covering_inequality_check(const SampledField& f, double r, double rho);

/// Running maximum of ||u(tau)||_{r,rho}^r over recorded tau <= t.
double psi_history(const SupNormHistory& history, const UlocParams& params, double t);

}  // namespace ulheat
