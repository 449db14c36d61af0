// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "loopsoup/experiments.hpp"
#include "loopsoup/greens.hpp"
#include "loopsoup/io.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/soup.hpp"
#include "oracles.hpp"

using namespace loopsoup;

namespace {

struct TestCase {
  const char* name;
  const char* intent;
  std::function<bool(void)> run;
};

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  std::fputs("    ", stdout);
  std::vprintf(fmt, ap);
  std::fputc('\n', stdout);
  std::fflush(stdout);
  va_end(ap);
}

double extra(const Estimate& e, const std::string& key) {
  for (const auto& [k, v] : e.diag.extra) {
    if (k == key) return v;
  }
  return kNaN;
}

// Richardson-extrapolated partial sums of p_k, independent of the Bessel integral.
double series_green0(int d) {
  const auto t = build_length_table(d, 8000);
  const std::vector<int> cut{500, 1000, 2000, 4000, 8000};
  const int m = static_cast<int>(cut.size());
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    double s = 1.0;
    for (int k = 2; k <= cut[i]; k += 2) s += t.p(k);
    b[i] = s;
    A(i, 0) = 1.0;
    for (int j = 1; j < m; ++j) A(i, j) = std::pow(static_cast<double>(cut[i]), -(d / 2.0 - 1.0) - (j - 1));
  }
  return A.colPivHouseholderQr().solve(b)[0];
}

bool green_values() {
  bool ok = true;
  const GreenTable g3(3);
  const double oracle = series_green0(3);
  const double diff = std::abs(g3.at_origin() - oracle);
  info("G3(0) = %.12f, series oracle %.12f, |diff| = %.2e (< 1e-6)", g3.at_origin(), oracle, diff);
  ok &= diff < 1e-6;

  std::mt19937_64 gen(2024);
  for (int d : {3, 5}) {
    const GreenTable g(d);
    std::uniform_int_distribution<int> u(-30, 30);
    double lo = 1e9, hi = -1e9;
    for (int done = 0; done < 20;) {
      Point x{};
      for (int i = 0; i < d; ++i) x[i] = u(gen);
      const double r = norm(x);
      if (r < 10.0 || r > 30.0) continue;
      ++done;
      const double ratio = g(x) * std::pow(r, d - 2) / green_constant(d);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    info("d=%d: G(x)|x|^{d-2}/C_d over 20 points in [%.5f, %.5f] (band [0.98, 1.02])", d, lo, hi);
    ok &= lo >= 0.98 && hi <= 1.02;
  }
  return ok;
}

bool capacity_identities() {
  bool ok = true;
  const GreenTable g(3);
  const std::vector<Point> zero{Point{}};
  const double e1 = std::abs(capacity(g, zero).cap - 1.0 / g.at_origin());
  const std::vector<Point> pair{Point{}, unit_vector(0)};
  const double e2 = std::abs(capacity(g, pair).cap - 2.0 / (g.at_origin() + g(unit_vector(0))));
  info("|cap({0}) - 1/G(0)| = %.2e, |cap({0,e1}) - 2/(G(0)+G(e1))| = %.2e (< 1e-10)", e1, e2);
  ok &= e1 < 1e-10 && e2 < 1e-10;

  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> u(-3, 3);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Point> K;
    const std::size_t size = 1 + gen() % 10;
    while (K.size() < size) {
      const Point p = make_point({u(gen), u(gen), u(gen)});
      if (std::find(K.begin(), K.end(), p) == K.end()) K.push_back(p);
    }
    auto sub = K;
    sub.resize(1 + gen() % K.size());
    if (capacity(g, sub).cap > capacity(g, K).cap + 1e-12) ++violations;
  }
  info("monotonicity violations on 100 nested pairs: %d", violations);
  return ok && violations == 0;
}

bool bridge_exactness() {
  const auto paths = oracle::closed_paths(2, 4);
  std::map<std::vector<int>, double> freq;
  for (const auto& s : paths) freq[s] = 0.0;
  const auto t2 = build_length_table(2, 4);
  Rng rng = Rng::stream(11, {1});
  const int n = 1'000'000;
  int unknown = 0;
  for (int i = 0; i < n; ++i) {
    const auto loop = sample_bridge(Point{}, 4, t2, rng);
    std::vector<int> steps;
    for (int j = 0; j < 4; ++j) {
      const Point delta = loop.trace[static_cast<std::size_t>(j + 1)] - loop.trace[static_cast<std::size_t>(j)];
      const int axis = delta[0] != 0 ? 0 : 1;
      steps.push_back(2 * axis + (delta[axis] < 0));
    }
    auto it = freq.find(steps);
    if (it == freq.end()) {
      ++unknown;
    } else {
      it->second += 1;
    }
  }
  double tv = 0.0;
  for (const auto& [_, c] : freq) tv += std::abs(c / n - 1.0 / static_cast<double>(paths.size()));
  tv /= 2;
  info("d=2 k=4: %zu enumerated paths, TV distance %.5f over 1e6 samples (< 0.01), unknown paths %d", paths.size(),
       tv, unknown);

  const auto t3 = build_length_table(3, 200);
  Rng rng3 = Rng::stream(11, {2});
  int bad = 0;
  long long steps = 0;
  for (int i = 0; i < n; ++i) {
    const int k = sample_length(t3, rng3);
    const auto loop = sample_bridge(Point{}, k, t3, rng3);
    steps += k;
    if (!loop_is_valid(loop, 3) || loop.trace.size() != static_cast<std::size_t>(k) + 1) ++bad;
  }
  info("d=3: closure/unit-step/zero-displacement violations on 1e6 loops (%lld steps): %d", steps, bad);
  return tv < 0.01 && unknown == 0 && bad == 0;
}

bool soup_law() {
  const auto t = build_length_table(3, 10);
  SoupParams p;
  p.alpha = 0.5;
  p.dim = 3;
  p.window = Box{Point{}, 3};
  p.table = &t;
  p.seed = 12;
  RunningStats count;
  for (uint64_t r = 0; r < 10000; ++r) {
    p.replica = r;
    count.add(static_cast<double>(sample_soup(p).size()));
  }
  const double expected = p.alpha * t.per_vertex_mass * static_cast<double>(ball_size(root_window(p), 3));
  const double dispersion = count.variance() / count.mean();
  info("10^4 windows: mean %.3f (alpha m_d |root window| = %.3f), dispersion %.4f (band [0.95, 1.05])",
       count.mean(), expected, dispersion);

  const auto t40 = build_length_table(3, 40);
  SoupParams q = p;
  q.window = Box{Point{}, 12};
  q.table = &t40;
  q.replica = 3;
  auto dump = [&](const Soup& s) {
    std::ostringstream os;
    write_soup_jsonl(os, s);
    return os.str();
  };
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string one = dump(sample_soup(q));
  omp_set_num_threads(8);
  const std::string eight = dump(sample_soup(q));
  omp_set_num_threads(saved);
  const std::string serial = dump(sample_soup_serial(q));
  const bool same = one == eight && one == serial;
  info("JSON-lines dump of a radius-12 soup: %zu bytes, 1 vs 8 threads vs serial %s", one.size(),
       same ? "identical" : "DIFFERENT");
  return dispersion >= 0.95 && dispersion <= 1.05 && same;
}

bool lemma_single_loop() {
  const GreenTable g(3);
  LemmaParams lp;
  lp.dim = 3;
  lp.green = &g;
  lp.grid = {10, 20, 40};
  lp.samples = 1'000'000;
  lp.seed = 33;
  const auto r = lemma_scan(LemmaKind::kSingleLoop, lp);
  bool ok = true;
  for (const auto& row : r.rows) {
    info("n=%2.0f: estimate %.6e +- %.1e, ratio to C_3 cap({0}) / n = %.4f +- %.4f (band [0.9, 1.1]); "
         "higher-order bound %.2e (%.2f%% of the estimate)",
         row.param, row.est.value, row.est.std_error, row.ratio, row.est.std_error / row.reference,
         row.est.diag.correction_bound, 100.0 * row.est.diag.correction_bound / row.est.value);
    ok &= row.ratio >= 0.9 && row.ratio <= 1.1;
  }
  return ok;
}

bool lemma_two_sets() {
  const GreenTable g(3);
  LemmaParams lp;
  lp.dim = 3;
  lp.green = &g;
  lp.grid = {8, 16};
  lp.samples = 1'000'000;
  lp.seed = 34;
  const auto r = lemma_scan(LemmaKind::kTwoSets, lp);
  bool ok = true;
  for (const auto& row : r.rows) {
    const double exact = extra(row.est, "exact_first_term");
    const double z = (row.est.value - exact) / row.est.std_error;
    info("|x|=%2.0f: estimate %.6e +- %.1e, (G(x)/G(0))^2 = %.6e, z = %+.2f (|z| < 3); asymptotic ratio %.3f",
         row.param, row.est.value, row.est.std_error, exact, z, row.ratio);
    ok &= std::abs(z) < 3.0;
  }
  return ok;
}

bool one_arm_order() {
  const auto table = build_length_table(5, 10000);
  const GreenTable g(5);
  CampaignParams p;
  p.dim = 5;
  p.alpha = 0.2;
  p.table = &table;
  p.green = &g;
  p.samples = 1'000'000;
  p.seed = 35;
  const auto r = one_arm_scan(p, {4, 6, 8}, 200000);
  bool ok = true;
  for (const auto& row : r.rows) {
    const double rel = row.ratio;
    info("n=%.0f: P = %.4e +- %.1e (CP [%.3e, %.3e], %.0f successes), n^3 P = %.4f +- %.4f, "
         "ratio to alpha C_5 E[Cap] = %.3f (band [0.25, 4])",
         row.param, row.est.value, row.est.std_error, row.ci_low, row.ci_high, extra(row.est, "successes"), row.scaled,
         row.scaled_se, rel);
    ok &= rel >= 0.25 && rel <= 4.0;
  }
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    for (std::size_t j = i + 1; j < r.rows.size(); ++j) {
      const auto &a = r.rows[i], &b = r.rows[j];
      const double z = (a.scaled - b.scaled) / std::hypot(a.scaled_se, b.scaled_se);
      info("n=%.0f vs n=%.0f: z = %+.2f (|z| < 3)", a.param, b.param, z);
      ok &= std::abs(z) < 3.0;
    }
  }
  for (const auto& [k, v] : r.summary) info("%s = %.6g", k.c_str(), v);
  info("length tail bound %.2e", table.tail_bound);
  return ok;
}

bool mecke_fkg() {
  const auto t = build_length_table(3, 6);
  MeckeParams mp;
  mp.alpha = 0.5;
  mp.table = &t;
  mp.window_radius = 2;
  mp.samples = 100000;
  mp.seed = 36;
  FkgParams fp;
  fp.alpha = 0.5;
  fp.table = &t;
  fp.samples = 20000;
  fp.seed = 37;
  bool ok = true;
  for (const auto& rep : {verify_mecke(mp), verify_fkg(fp)}) {
    for (const auto& c : rep.checks) {
      info("%s/%s: observed %.6g, expected %.6g, se %.2g, %s", rep.suite.c_str(), c.name.c_str(), c.observed,
           c.expected, c.std_error, c.pass ? "ok" : "VIOLATED");
    }
    ok &= rep.passed();
  }
  return ok;
}

bool capacity_limit() {
  const auto table = build_length_table(5, 2000);
  const GreenTable g(5);
  CampaignParams p;
  p.dim = 5;
  p.table = &table;
  p.green = &g;
  p.samples = 1'000'000;
  p.seed = 38;
  const auto c = capacity_alpha_limit(p, {0.025, 0.05, 0.1, 0.2}, 16, 2);
  bool ok = true;
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    const auto& e = c.estimates[i];
    info("alpha=%.3f: E[Cap] = %.6f +- %.1e, touch rate %.2e (< 1%%)", c.alphas[i], e.value, e.std_error,
         e.diag.boundary_touch_rate);
    ok &= e.diag.boundary_touch_rate < 0.01;
  }
  info("quadratic fit: intercept %.6f +- %.1e, 1/G5(0) = %.6f, z = %+.2f (|z| < 3), chi2 %.2f on %d dof",
       c.fit.coef[0], c.fit.coef_se[0], c.reference, c.z, c.fit.chi2, c.fit.dof);
  return ok && std::abs(c.z) < 3.0;
}

}  // namespace

int main() {
  const std::vector<TestCase> cases{
      {"green_values", "G3(0) vs series oracle to 1e-6; G(x)|x|^{d-2}/C_d in [0.98, 1.02]", green_values},
      {"capacity_identities", "1x1 and 2x2 capacities to 1e-10; monotone on nested sets", capacity_identities},
      {"bridge_exactness", "d=2 k=4 TV < 0.01 at 1e6; invariants on 1e6 loops", bridge_exactness},
      {"soup_law", "Poisson dispersion in [0.95, 1.05] over 1e4 windows; 1 vs 8 thread bytes", soup_law},
      {"single_loop_mass", "d=3 mu[0 <-> dB_n] n / (C_3 cap) in [0.9, 1.1], n = 10, 20, 40", lemma_single_loop},
      {"two_singletons_mass", "d=3 mu[0 <-> x] vs (G(x)/G(0))^2 within 3 SE, |x| = 8, 16", lemma_two_sets},
      {"one_arm_order", "d=5 alpha=0.2 n^3 P(0 <-> dB_n), n = 4, 6, 8: within 3 sigma and bounded", one_arm_order},
      {"mecke_fkg", "Mecke functionals within 4 sigma; no FKG pair below -4 sigma", mecke_fkg},
      {"capacity_alpha_limit", "d=5 E[Cap] as alpha -> 0 within 3 sigma of 1/G5(0); touch rate < 1%",
       capacity_limit},
  };
  int failed = 0;
  for (const auto& c : cases) {
    std::printf("[%s] %s\n", c.name, c.intent);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      info("exception: %s", e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.name, sec);
    std::fflush(stdout);
    failed += !ok;
  }
  std::printf("%zu/%zu criteria passed\n", cases.size() - static_cast<std::size_t>(failed), cases.size());
  return failed == 0 ? 0 : 1;
}
