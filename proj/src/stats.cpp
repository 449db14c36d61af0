#include "loopsoup/stats.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_multifit.h>

#include <boost/math/special_functions/beta.hpp>

#include <cmath>

#include "loopsoup/lattice.hpp"

namespace loopsoup {

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += o.m2_ + delta * delta * na * nb / n;
  n_ += o.n_;
}

double RunningStats::std_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

void RatioStats::merge(const RatioStats& o) {
  n_ += o.n_;
  sa_ += o.sa_;
  sb_ += o.sb_;
  saa_ += o.saa_;
  sbb_ += o.sbb_;
  sab_ += o.sab_;
}

double RatioStats::std_error() const {
  if (n_ < 2 || sb_ == 0.0) return 0.0;
  const double n = static_cast<double>(n_);
  const double r = ratio();
  const double mb = sb_ / n;
  // residual variance of a - r b
  const double s2 = (saa_ - 2 * r * sab_ + r * r * sbb_) / (n - 1);
  return std::sqrt(std::max(s2, 0.0) / n) / std::abs(mb);
}

Estimate make_estimate(const RunningStats& s, uint64_t seed) {
  Estimate e;
  e.value = s.mean();
  e.std_error = s.std_error();
  e.samples = s.count();
  e.seed = seed;
  return e;
}

std::pair<double, double> clopper_pearson(uint64_t k, uint64_t n, double confidence) {
  if (n == 0) throw InvalidArgument("clopper_pearson: no trials");
  const double a = 1.0 - confidence;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  // gsl_cdf_beta_Pinv loses convergence for n ~ 1e5 and k small
  const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1, a / 2);
  const double hi = k == n ? 1.0 : boost::math::ibetac_inv(kd + 1, nd - kd, a / 2);
  return {lo, hi};
}

double chi_square_sf(double x, double dof) { return gsl_cdf_chisq_Q(x, dof); }

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& se) {
  if (x.size() != y.size() || x.size() != se.size() || x.size() < 2) {
    throw InvalidArgument("weighted_linear_fit: need at least two matching points");
  }
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(se[i] > 0)) throw InvalidArgument("weighted_linear_fit: non-positive standard error");
    const double w = 1.0 / (se[i] * se[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  LinearFit f;
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope = (s * sxy - sx * sy) / det;
  f.intercept_se = std::sqrt(sxx / det);
  f.slope_se = std::sqrt(s / det);
  return f;
}

PolyFit weighted_poly_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& se, int degree) {
  const std::size_t n = x.size();
  const auto p = static_cast<std::size_t>(degree) + 1;
  if (degree < 0 || y.size() != n || se.size() != n || n < p) {
    throw InvalidArgument("weighted_poly_fit: need at least degree + 1 matching points");
  }
  for (double e : se) {
    if (!(e > 0)) throw InvalidArgument("weighted_poly_fit: non-positive standard error");
  }
  gsl_matrix* X = gsl_matrix_alloc(n, p);
  gsl_vector* Y = gsl_vector_alloc(n);
  gsl_vector* W = gsl_vector_alloc(n);
  gsl_vector* c = gsl_vector_alloc(p);
  gsl_matrix* cov = gsl_matrix_alloc(p, p);
  gsl_multifit_linear_workspace* work = gsl_multifit_linear_alloc(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    double xp = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      gsl_matrix_set(X, i, j, xp);
      xp *= x[i];
    }
    gsl_vector_set(Y, i, y[i]);
    gsl_vector_set(W, i, 1.0 / (se[i] * se[i]));
  }
  PolyFit f;
  gsl_multifit_wlinear(X, W, Y, c, cov, &f.chi2, work);
  for (std::size_t j = 0; j < p; ++j) {
    f.coef.push_back(gsl_vector_get(c, j));
    f.coef_se.push_back(std::sqrt(gsl_matrix_get(cov, j, j)));
  }
  f.dof = static_cast<int>(n - p);
  gsl_multifit_linear_free(work);
  gsl_matrix_free(cov);
  gsl_vector_free(c);
  gsl_vector_free(W);
  gsl_vector_free(Y);
  gsl_matrix_free(X);
  return f;
}

}  // namespace loopsoup
