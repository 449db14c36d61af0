#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace loopsoup {

/// Welford accumulator. merge() is exact in the Chan et al. sense; merging
/// partial results in a fixed order makes the totals bit-reproducible.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& o);

  uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const;

 private:
  uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Accumulates (numerator, denominator) pairs for a ratio estimator
/// sum(a) / sum(b) with a delta-method standard error.
class RatioStats {
 public:
  void add(double a, double b) {
    ++n_;
    sa_ += a;
    sb_ += b;
    saa_ += a * a;
    sbb_ += b * b;
    sab_ += a * b;
  }
  void merge(const RatioStats& o);

  uint64_t count() const { return n_; }
  double ratio() const { return sb_ != 0.0 ? sa_ / sb_ : 0.0; }
  double std_error() const;

 private:
  uint64_t n_ = 0;
  double sa_ = 0, sb_ = 0, saa_ = 0, sbb_ = 0, sab_ = 0;
};

/// Truncation and reporting diagnostics carried by every Monte Carlo result.
struct Diagnostics {
  double tail_bound = 0.0;           // missing per-vertex loop mass above L_max
  double boundary_touch_rate = 0.0;  // fraction of replicas whose cluster hit the window edge
  double correction_bound = 0.0;     // bound on neglected higher-order terms, if any
  double lower = 0.0;                // bracket for estimators that cannot be made exact
  double upper = 0.0;
  int max_length = 0;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> extra;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  uint64_t samples = 0;
  uint64_t seed = 0;
  double wall_seconds = 0.0;
  Diagnostics diag;
};

Estimate make_estimate(const RunningStats& s, uint64_t seed);

/// Two-sided Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(uint64_t k, uint64_t n, double confidence = 0.95);

/// Upper-tail probability of the chi-square distribution.
double chi_square_sf(double x, double dof);

/// Weighted least squares fit y = a + b x with per-point standard errors;
/// returns {a, se(a), b, se(b)}.
struct LinearFit {
  double intercept = 0, intercept_se = 0, slope = 0, slope_se = 0;
};
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& se);

/// Weighted least squares polynomial fit y = sum_j coef[j] x^j with known
/// per-point standard errors (no rescaling by the residual).
struct PolyFit {
  std::vector<double> coef;
  std::vector<double> coef_se;
  double chi2 = 0.0;
  int dof = 0;
};
PolyFit weighted_poly_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& se, int degree);

}  // namespace loopsoup
