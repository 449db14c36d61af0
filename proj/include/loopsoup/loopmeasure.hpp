#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopsoup/greens.hpp"
#include "loopsoup/lattice.hpp"
#include "loopsoup/rng.hpp"
#include "loopsoup/stats.hpp"

namespace loopsoup {

// ---------------------------------------------------------------------------
// Return-probability tables

/// Return probabilities p_k(0,0) for even k <= max_length and everything the
/// samplers derive from them. Arrays are indexed by h = k/2.
struct LengthTable {
  int dim = 0;
  int max_length = 0;
  std::vector<double> return_prob;  // p_{2h}; return_prob[0] = 1
  std::vector<double> weights;      // w_{2h} = p_{2h} / (2h); weights[0] = 0
  double per_vertex_mass = 0.0;     // m_d = sum_h w_{2h}
  double return_mass = 0.0;         // sum_{h>=1} p_{2h}, the expected number of returns
  double tail_bound = 0.0;          // bound on sum_{k > max_length} w_k
  std::vector<double> length_cdf;   // cumulative w / m_d over h = 1..H (entry h-1)
  std::vector<double> return_cdf;   // cumulative p / return_mass over h = 1..H
  /// partial[j][h] = probability that a 2h-step walk in Z^j returns; the
  /// per-coordinate convolution stages, partial[dim] == return_prob.
  std::vector<std::vector<double>> partial;
  std::vector<double> log_factorial;  // log(n!) for n <= max_length
  std::vector<std::string> warnings;

  double p(int k) const { return (k & 1) ? 0.0 : return_prob.at(static_cast<std::size_t>(k / 2)); }
  double w(int k) const { return (k & 1) ? 0.0 : weights.at(static_cast<std::size_t>(k / 2)); }
};

enum class Exec { kSerial, kParallel };

/// Builds the table from the coordinate decomposition of closed paths,
///   p_k = sum over even (n_1..n_d) summing to k of
///         multinomial(k; n) d^{-k} prod_j C(n_j, n_j/2) 2^{-n_j},
/// evaluated as d-1 successive log-space convolutions. Entries with k <= 16
/// are checked against exact integer path counts.
/// tolerance: a warning is attached when tail_bound exceeds it.
LengthTable build_length_table(int d, int max_length, double tolerance = 1e-4,
                               Exec exec = Exec::kParallel);

/// Number of closed nearest-neighbour k-step paths from the origin of Z^d,
/// exact in 128-bit arithmetic. Throws if k > 16 or the count would overflow.
unsigned __int128 exact_closed_paths(int d, int k);

struct VertexMass {
  double mass = 0.0;        // m_d over the tabulated lengths
  double tail_bound = 0.0;  // missing mass above max_length
};
VertexMass per_vertex_mass(const LengthTable& table);

/// Suggested even max_length for which the tail bound drops below tolerance.
int suggested_max_length(int d, double tolerance);

/// Length k drawn with probability w_k / m_d (truncated law).
int sample_length(const LengthTable& table, Rng& rng);
/// Length k drawn with probability p_k / return_mass.
int sample_return_length(const LengthTable& table, Rng& rng);

// ---------------------------------------------------------------------------
// Loops

/// A rooted closed nearest-neighbour path.
struct Loop {
  Point root{};
  int length = 0;
  std::vector<Point> trace;  // length + 1 points, trace.front() == trace.back() == root

  std::vector<Edge> edges() const;    // distinct, sorted
  std::vector<Point> range() const;   // distinct vertices, sorted
  double diameter() const;            // max pairwise Euclidean distance of the range
  bool diameter_exceeds(double m) const;
  bool visits(const Point& x) const;
  std::size_t visit_count(const Point& x) const;  // time indices j in [0, length)
};

/// Uniform closed path of k steps rooted at root (k even, 2 <= k <= max_length).
/// Coordinate step counts are drawn sequentially from the stored partial
/// convolutions; the resulting multiset of +-e_j steps is then uniformly
/// permuted, which is uniform over the closed paths with those counts.
Loop sample_bridge(const Point& root, int k, const LengthTable& table, Rng& rng);

/// Checks closure, unit steps and zero per-coordinate displacement.
bool loop_is_valid(const Loop& loop, int d);

// ---------------------------------------------------------------------------
// Connection masses of the loop measure

struct ConnectParams {
  int dim = 3;
  std::vector<Point> sources;           // K
  std::vector<Point> target_points;     // L as a point set, or ...
  std::optional<Box> target_sphere;     // ... L = inner boundary of this ball
  std::optional<Box> detour;            // require reaching the boundary of this ball before L
  int64_t kill_radius = 0;              // 0: 4x the largest geometric scale
  uint64_t samples = 100000;            // walks per source point
  uint64_t seed = 1;
};

/// Monte Carlo estimate of the leading term sum_{x in K} P_x(w(tau_2) = x) of
///   mu[K <-> L] = sum_{x in K} sum_{n >= 1} (1/n) P_x(w(tau_2n) = x).
/// Walks are stopped at the kill radius and completed analytically with
/// hitting probabilities from G: exactly for singleton sets, otherwise as a
/// [0, upper] bracket reported in diag.lower/diag.upper. diag.correction_bound
/// bounds the neglected n >= 2 terms.
Estimate loop_mass_connect(const GreenTable& green, const ConnectParams& params);

int64_t default_kill_radius(const ConnectParams& params);

enum class RangeRoute {
  kTranslation,  // mu[F; 0 in w] = sum_k w_k E_k[|R| F]
  kRootVisits,   // mu[F; 0 in w] = sum_k p_k E_k[F / #visits to 0]
};

struct RangeParams {
  double min_diameter = 0.0;   // m: condition on diam(w) > m
  uint64_t samples = 100000;
  uint64_t seed = 1;
  double long_fraction = 0.5;  // share of proposals drawn log-uniformly in k
  RangeRoute route = RangeRoute::kTranslation;
};

/// Mean range size mu[#R(w) | diam(w) > m, 0 in w] of loops through the
/// origin, by importance sampling over the truncated length law. diag.extra
/// carries "ratio_m2" (value / m^2) and "accepted".
Estimate loop_range_stats(const LengthTable& table, const RangeParams& params);

}  // namespace loopsoup
