#pragma once

#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "loopsoup/lattice.hpp"

namespace loopsoup {

/// Leading coefficient of G(x) ~ C_d |x|^{2-d}: d Gamma(d/2) / ((d-2) pi^{d/2}).
double green_constant(int d);

/// Quadrature controls for the Bessel-product representation
///   G(x) = int_0^inf prod_j e^{-t/d} I_{x_j}(t/d) dt.
/// [0, T] is integrated with Gauss-Legendre panels uniform in log(1+t);
/// [T, inf) uses the large-argument expansion of each Bessel factor up to
/// tail_order. T/d = max(min_split, split_factor * max_j x_j^2).
struct GreenQuadrature {
  double min_split = 1000.0;
  double split_factor = 16.0;
  double panel_width = 0.5;
  int nodes = 12;
  int tail_order = 4;
};

/// Uncached evaluation of the lattice Green's function (expected visits to x
/// of simple random walk from 0). Requires d >= 3.
double green_integral(const Point& x, int d, const GreenQuadrature& q = {});

/// Memoized G(x) for one dimension, keyed by the symmetry-canonical form of x.
/// Lookups are thread-safe; prefill() computes a batch of keys in parallel.
class GreenTable {
 public:
  explicit GreenTable(int d, GreenQuadrature q = {});

  int dim() const { return d_; }
  const GreenQuadrature& quadrature() const { return q_; }

  double operator()(const Point& x) const;
  double at_origin() const { return g0_; }

  void prefill(std::span<const Point> xs) const;
  /// All canonical points with r2_lo < |x|^2 <= r2_hi.
  void prefill_shell(int64_t r2_lo, int64_t r2_hi) const;

  std::size_t cached() const;

 private:
  int d_;
  GreenQuadrature q_;
  double g0_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Point, double, PointHash> cache_;
};

/// P_y(H_0 < inf) = G(y) / G(0), y != 0.
double hit_single_point(const GreenTable& g, const Point& y);

struct CapacityResult {
  std::vector<Point> set;
  std::vector<double> equilibrium;  // e_K(x) = Es_K(x)
  double cap = 0.0;
  double residual = 0.0;            // || G_K e - 1 ||_inf
};

inline constexpr std::size_t kMaxCapacitySet = 2000;

/// Solves G_K e = 1 by a symmetric LDL^T factorization. Duplicate points are
/// merged. Throws NumericalError if the matrix is numerically singular or
/// the residual exceeds 1e-10.
CapacityResult capacity(const GreenTable& g, std::span<const Point> set);

/// P_y(H_K < inf) = sum_{x in K} G(y - x) e_K(x); exactly 1 for y in K.
double hitting_probability(const GreenTable& g, const Point& y, const CapacityResult& k);

}  // namespace loopsoup
