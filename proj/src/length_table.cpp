#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "loopsoup/loopmeasure.hpp"

namespace loopsoup {

namespace {

constexpr int kExactCheckMaxLength = 16;

double tail_constant(int d, double p_last, int max_length) {
  const double dd = d;
  // p_k ~ 2 (d / (2 pi k))^{d/2}; take the larger of the fitted and limiting
  // constants so the bound holds on either side of the asymptote
  const double fitted = p_last * std::pow(static_cast<double>(max_length), dd / 2);
  const double limit = 2 * std::pow(dd / (2 * std::numbers::pi), dd / 2);
  return std::max(fitted, limit);
}

// sum_{k > L, k even} c k^{-1-d/2} <= (1/2) int_L^inf c k^{-1-d/2} dk = c L^{-d/2} / d
double tail_from_constant(double c, int d, int max_length) {
  return c * std::pow(static_cast<double>(max_length), -d / 2.0) / d;
}

/// One row of the stage-j convolution:
///   P_j(2h) = sum_a Binom(2h, 2a; 1/j) q(2a) P_{j-1}(2h - 2a).
double convolve_row(int h, const std::vector<double>& lf, const std::vector<double>& a_term,
                    const std::vector<double>& b_term) {
  const double base = lf[static_cast<std::size_t>(2 * h)];
  double s = 0.0;
  for (int a = 0; a <= h; ++a) {
    s += std::exp(base + a_term[static_cast<std::size_t>(a)] + b_term[static_cast<std::size_t>(h - a)]);
  }
  return s;
}

}  // namespace

unsigned __int128 exact_closed_paths(int d, int k) {
  require_dim(d);
  if (k < 0 || k > kExactCheckMaxLength) throw InvalidArgument("exact_closed_paths: k outside [0, 16]");
  if (k & 1) return 0;
  using U = unsigned __int128;
  std::vector<std::vector<U>> binom(static_cast<std::size_t>(k) + 1);
  for (int n = 0; n <= k; ++n) {
    binom[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 1);
    for (int r = 1; r < n; ++r) {
      binom[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] =
          binom[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(r - 1)] +
          binom[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(r)];
    }
  }
  auto C = [&](int n, int r) { return binom[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)]; };
  // N_j(s): closed s-step paths in Z^j
  std::vector<U> prev(static_cast<std::size_t>(k) + 1, 0);
  prev[0] = 1;
  for (int j = 1; j <= d; ++j) {
    std::vector<U> next(prev.size(), 0);
    for (int s = 0; s <= k; s += 2) {
      for (int m = 0; m <= s; m += 2) {
        next[static_cast<std::size_t>(s)] += C(s, m) * C(m, m / 2) * prev[static_cast<std::size_t>(s - m)];
      }
    }
    prev = std::move(next);
  }
  return prev[static_cast<std::size_t>(k)];
}

int suggested_max_length(int d, double tolerance) {
  const double dd = d;
  const double c = 2 * std::pow(dd / (2 * std::numbers::pi), dd / 2);
  const double l = std::pow(c / (dd * tolerance), 2.0 / dd);
  int k = static_cast<int>(std::ceil(l));
  return k + (k & 1);
}

LengthTable build_length_table(int d, int max_length, double tolerance, Exec exec) {
  require_dim(d);
  if (max_length < 2 || (max_length & 1)) {
    throw InvalidArgument("max_length must be an even integer >= 2, got " + std::to_string(max_length));
  }
  LengthTable t;
  t.dim = d;
  t.max_length = max_length;
  const int H = max_length / 2;
  const auto hs = static_cast<std::size_t>(H) + 1;

  t.log_factorial.resize(static_cast<std::size_t>(max_length) + 1);
  for (int n = 0; n <= max_length; ++n) t.log_factorial[static_cast<std::size_t>(n)] = std::lgamma(n + 1.0);
  const auto& lf = t.log_factorial;

  // single coordinate: q(2a) = C(2a, a) / 4^a
  std::vector<double> log_q(hs);
  for (int a = 0; a <= H; ++a) {
    log_q[static_cast<std::size_t>(a)] = lf[static_cast<std::size_t>(2 * a)] - 2 * lf[static_cast<std::size_t>(a)] -
                                         2 * a * std::numbers::ln2;
  }

  t.partial.assign(static_cast<std::size_t>(d) + 1, std::vector<double>(hs, 0.0));
  t.partial[0][0] = 1.0;
  for (int a = 0; a <= H; ++a) t.partial[1][static_cast<std::size_t>(a)] = std::exp(log_q[static_cast<std::size_t>(a)]);

  std::vector<double> a_term(hs), b_term(hs);
  for (int j = 2; j <= d; ++j) {
    const double l_new = -std::log(static_cast<double>(j));
    const double l_old = std::log((j - 1.0) / j);
    const auto& prev = t.partial[static_cast<std::size_t>(j - 1)];
    for (int a = 0; a <= H; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      a_term[ai] = -lf[static_cast<std::size_t>(2 * a)] + 2 * a * l_new + log_q[ai];
      b_term[ai] = -lf[static_cast<std::size_t>(2 * a)] + 2 * a * l_old + std::log(prev[ai]);
    }
    auto& row = t.partial[static_cast<std::size_t>(j)];
    if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
      for (int h = 0; h <= H; ++h) row[static_cast<std::size_t>(h)] = convolve_row(h, lf, a_term, b_term);
    } else {
      for (int h = 0; h <= H; ++h) row[static_cast<std::size_t>(h)] = convolve_row(h, lf, a_term, b_term);
    }
  }

  t.return_prob = t.partial[static_cast<std::size_t>(d)];
  t.return_prob[0] = 1.0;

  for (int k = 2; k <= std::min(max_length, kExactCheckMaxLength); k += 2) {
    const long double exact = static_cast<long double>(exact_closed_paths(d, k)) /
                              std::pow(static_cast<long double>(2 * d), k);
    const double got = t.p(k);
    if (std::abs(static_cast<long double>(got) - exact) > 1e-12L * exact) {
      throw NumericalError("length table: p_" + std::to_string(k) + " disagrees with exact path count");
    }
  }

  t.weights.assign(hs, 0.0);
  t.length_cdf.resize(static_cast<std::size_t>(H));
  t.return_cdf.resize(static_cast<std::size_t>(H));
  double mass = 0.0, ret = 0.0;
  for (int h = 1; h <= H; ++h) {
    const auto hi = static_cast<std::size_t>(h);
    t.weights[hi] = t.return_prob[hi] / (2.0 * h);
    mass += t.weights[hi];
    ret += t.return_prob[hi];
    t.length_cdf[hi - 1] = mass;
    t.return_cdf[hi - 1] = ret;
  }
  for (auto& c : t.length_cdf) c /= mass;
  for (auto& c : t.return_cdf) c /= ret;
  t.length_cdf.back() = 1.0;
  t.return_cdf.back() = 1.0;
  t.per_vertex_mass = mass;
  t.return_mass = ret;

  t.tail_bound = tail_from_constant(tail_constant(d, t.return_prob.back(), max_length), d, max_length);
  if (t.tail_bound > tolerance) {
    t.warnings.push_back("tail bound " + std::to_string(t.tail_bound) + " exceeds tolerance " +
                         std::to_string(tolerance) + "; suggested max_length " +
                         std::to_string(suggested_max_length(d, tolerance)));
  }
  return t;
}

VertexMass per_vertex_mass(const LengthTable& table) { return {table.per_vertex_mass, table.tail_bound}; }

int sample_length(const LengthTable& table, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(table.length_cdf.begin(), table.length_cdf.end(), u);
  return 2 * (static_cast<int>(it - table.length_cdf.begin()) + 1);
}

int sample_return_length(const LengthTable& table, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(table.return_cdf.begin(), table.return_cdf.end(), u);
  return 2 * (static_cast<int>(it - table.return_cdf.begin()) + 1);
}

}  // namespace loopsoup
