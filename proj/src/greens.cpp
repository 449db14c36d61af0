#include "loopsoup/greens.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_bessel.h>
#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <string>

namespace loopsoup {

double green_constant(int d) {
  if (d < 3) throw InvalidArgument("recurrent dimension: Green's function requires d >= 3");
  require_dim(d, 3);
  const double dd = d;
  return dd * std::tgamma(dd / 2) / ((dd - 2) * std::pow(std::numbers::pi, dd / 2));
}

namespace {

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};

const GslInit& gsl_init() {
  static const GslInit init;
  return init;
}

double scaled_bessel(int n, double s) {
  gsl_sf_result r;
  // underflow means the factor is below ~1e-308; the product is then zero
  return gsl_sf_bessel_In_scaled_e(n, s, &r) == GSL_SUCCESS ? r.val : 0.0;
}

class GaussLegendre {
 public:
  explicit GaussLegendre(int n) : nodes_(static_cast<std::size_t>(n)), weights_(nodes_.size()) {
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      gsl_integration_glfixed_point(-1.0, 1.0, static_cast<std::size_t>(i), &nodes_[static_cast<std::size_t>(i)],
                                    &weights_[static_cast<std::size_t>(i)], t);
    }
    gsl_integration_glfixed_table_free(t);
  }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace

double green_integral(const Point& x, int d, const GreenQuadrature& q) {
  if (d < 3) throw InvalidArgument("recurrent dimension: Green's function requires d >= 3");
  require_dim(d, 3);
  (void)gsl_init();
  const Point cx = canonical(x);
  const double dd = d;
  const double nmax = cx[0];
  const double split_s = std::max(q.min_split, q.split_factor * nmax * nmax);
  const double split_t = split_s * dd;

  const GaussLegendre gl(q.nodes);
  const double u_end = std::log1p(split_t);
  const int panels = static_cast<int>(std::ceil(u_end / q.panel_width));
  const double h = u_end / panels;

  double body = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.nodes().size(); ++i) {
      const double u = mid + 0.5 * h * gl.nodes()[i];
      const double t = std::expm1(u);
      const double s = t / dd;
      double f = 1.0;
      for (int j = 0; j < d && f != 0.0; ++j) f *= scaled_bessel(cx[j], s);
      body += 0.5 * h * gl.weights()[i] * f * (t + 1.0);
    }
  }

  // e^{-s} I_n(s) ~ (2 pi s)^{-1/2} sum_k b_k(n) s^{-k},
  // b_k = -b_{k-1} (4n^2 - (2k-1)^2) / (8k)
  const int order = q.tail_order;
  std::vector<double> coeff(static_cast<std::size_t>(order) + 1, 0.0);
  coeff[0] = 1.0;
  for (int j = 0; j < d; ++j) {
    const double n = cx[j];
    std::vector<double> b(coeff.size());
    b[0] = 1.0;
    for (int k = 1; k <= order; ++k) {
      const double odd = 2.0 * k - 1.0;
      b[static_cast<std::size_t>(k)] = -b[static_cast<std::size_t>(k - 1)] * (4 * n * n - odd * odd) / (8.0 * k);
    }
    std::vector<double> next(coeff.size(), 0.0);
    for (int a = 0; a <= order; ++a) {
      for (int k = 0; a + k <= order; ++k) {
        next[static_cast<std::size_t>(a + k)] += coeff[static_cast<std::size_t>(a)] * b[static_cast<std::size_t>(k)];
      }
    }
    coeff = std::move(next);
  }
  double tail = 0.0;
  for (int k = 0; k <= order; ++k) {
    const double e = dd / 2 + k - 1;
    tail += coeff[static_cast<std::size_t>(k)] * std::pow(split_s, -e) / e;
  }
  tail *= dd * std::pow(2 * std::numbers::pi, -dd / 2);
  return body + tail;
}

GreenTable::GreenTable(int d, GreenQuadrature q) : d_(d), q_(q) {
  if (d < 3) throw InvalidArgument("recurrent dimension: Green's function requires d >= 3");
  require_dim(d, 3);
  g0_ = green_integral(Point{}, d_, q_);
  cache_.emplace(Point{}, g0_);
}

double GreenTable::operator()(const Point& x) const {
  const Point key = canonical(x);
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double v = green_integral(key, d_, q_);
  std::unique_lock lock(mu_);
  cache_.emplace(key, v);
  return v;
}

void GreenTable::prefill(std::span<const Point> xs) const {
  std::vector<Point> missing;
  {
    std::set<Point> keys;
    for (const auto& x : xs) keys.insert(canonical(x));
    std::shared_lock lock(mu_);
    for (const auto& k : keys) {
      if (!cache_.count(k)) missing.push_back(k);
    }
  }
  std::vector<double> values(missing.size());
  const auto n = static_cast<std::ptrdiff_t>(missing.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    values[static_cast<std::size_t>(i)] = green_integral(missing[static_cast<std::size_t>(i)], d_, q_);
  }
  std::unique_lock lock(mu_);
  for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], values[i]);
}

namespace {

// canonical points (descending nonnegative coordinates) with lo < |x|^2 <= hi
void enumerate_canonical(int d, int axis, int32_t cap, int64_t used, int64_t lo, int64_t hi, Point& cur,
                         std::vector<Point>& out) {
  if (axis == d) {
    if (used > lo) out.push_back(cur);
    return;
  }
  for (int32_t v = 0; v <= cap; ++v) {
    const int64_t u = used + static_cast<int64_t>(v) * v;
    if (u > hi) break;
    // remaining axes can add at most (d - axis - 1) v^2
    if (u + static_cast<int64_t>(d - axis - 1) * v * v <= lo && v < cap) continue;
    cur[axis] = v;
    enumerate_canonical(d, axis + 1, v, u, lo, hi, cur, out);
  }
  cur[axis] = 0;
}

}  // namespace

void GreenTable::prefill_shell(int64_t r2_lo, int64_t r2_hi) const {
  std::vector<Point> pts;
  Point cur;
  const auto cap = static_cast<int32_t>(std::ceil(std::sqrt(static_cast<double>(r2_hi))));
  enumerate_canonical(d_, 0, cap, 0, r2_lo, r2_hi, cur, pts);
  prefill(pts);
}

std::size_t GreenTable::cached() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

double hit_single_point(const GreenTable& g, const Point& y) {
  if (y == Point{}) throw InvalidArgument("hit_single_point: y must differ from the origin");
  return g(y) / g.at_origin();
}

CapacityResult capacity(const GreenTable& g, std::span<const Point> set) {
  std::vector<Point> pts(set.begin(), set.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.empty()) throw InvalidArgument("capacity: empty set");
  if (pts.size() > kMaxCapacitySet) {
    throw InvalidArgument("capacity: set of size " + std::to_string(pts.size()) + " exceeds " +
                          std::to_string(kMaxCapacitySet));
  }
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd gm(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gm(i, i) = g.at_origin();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = g(pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]);
      gm(i, j) = v;
      gm(j, i) = v;
    }
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gm);
  const double rcond = ldlt.rcond();
  if (ldlt.info() != Eigen::Success || !(rcond > 1e-14)) {
    throw NumericalError("capacity: Green matrix numerically singular (rcond " + std::to_string(rcond) +
                         "); Green values are inaccurate");
  }
  const Eigen::VectorXd e = ldlt.solve(ones);
  const double residual = (gm * e - ones).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-10)) {
    throw NumericalError("capacity: residual " + std::to_string(residual) + " above 1e-10 (rcond " +
                         std::to_string(rcond) + ")");
  }
  CapacityResult r;
  r.set = std::move(pts);
  r.equilibrium.assign(e.data(), e.data() + n);
  r.cap = e.sum();
  r.residual = residual;
  return r;
}

double hitting_probability(const GreenTable& g, const Point& y, const CapacityResult& k) {
  if (std::binary_search(k.set.begin(), k.set.end(), y)) return 1.0;
  double s = 0.0;
  for (std::size_t i = 0; i < k.set.size(); ++i) s += g(y - k.set[i]) * k.equilibrium[i];
  if (s > 1.0 + 1e-8 || s < -1e-8) {
    std::cerr << "warning: hitting probability " << s << " clamped to [0,1]\n";
  }
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace loopsoup
