#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "loopsoup/experiments.hpp"
#include "loopsoup/stats.hpp"

using namespace loopsoup;

namespace {

struct D5 {
  LengthTable table = build_length_table(5, 2000);
  GreenTable green{5};
};

const D5& d5() {
  static const D5 instance;
  return instance;
}

CampaignParams campaign(double alpha, uint64_t samples, uint64_t seed) {
  CampaignParams p;
  p.dim = 5;
  p.alpha = alpha;
  p.table = &d5().table;
  p.green = &d5().green;
  p.samples = samples;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("statistics helpers") {
  auto [lo, hi] = clopper_pearson(0, 10);
  CHECK(lo == 0.0);
  CHECK(hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
  std::tie(lo, hi) = clopper_pearson(10, 10);
  CHECK(lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-10));
  CHECK(hi == 1.0);
  std::tie(lo, hi) = clopper_pearson(56, 100000);
  CHECK(lo > 0.0);
  CHECK(lo < 56e-5);
  CHECK(hi > 56e-5);

  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_sf(7.814727903, 3) == doctest::Approx(0.05).epsilon(1e-6));

  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0}, se(5, 0.1);
  std::vector<double> y;
  for (double v : x) y.push_back(1.5 - 0.5 * v + 0.25 * v * v);
  const auto f = weighted_poly_fit(x, y, se, 2);
  CHECK(f.coef[0] == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(f.coef[1] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(f.coef[2] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(f.dof == 2);
  CHECK_THROWS_AS(weighted_poly_fit(x, y, se, 5), InvalidArgument);

  RunningStats a, b, all;
  for (int i = 0; i < 100; ++i) {
    (i < 37 ? a : b).add(i * 0.5);
    all.add(i * 0.5);
  }
  a.merge(b);
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("expected cluster capacity at small activity") {
  const double cap0 = 1.0 / d5().green.at_origin();
  const auto zero = expected_cluster_capacity(campaign(0.0, 1000, 40), 8);
  CHECK(zero.value == doctest::Approx(cap0).epsilon(1e-12));
  CHECK(zero.std_error == 0.0);

  // first-order excess against single loops at the origin
  const double alpha = 0.05;
  const auto e = expected_cluster_capacity(campaign(alpha, 400000, 41), 16);
  CHECK(e.value > cap0);
  CHECK(e.diag.boundary_touch_rate < 0.01);
  const auto slope = one_loop_capacity_slope(d5().table, d5().green, 200000, 42);
  CHECK(slope.value > 0.0);
  const double ratio = (e.value - cap0) / alpha / slope.value;
  CHECK(ratio > 0.8);
  CHECK(ratio < 1.2);

  const auto e2 = expected_cluster_capacity(campaign(0.1, 200000, 43), 16);
  const auto e3 = expected_cluster_capacity(campaign(0.2, 200000, 44), 16);
  CHECK(e2.value > e.value - 3.0 * std::hypot(e.std_error, e2.std_error));
  CHECK(e3.value > e2.value - 3.0 * std::hypot(e2.std_error, e3.std_error));

  CHECK_THROWS_AS(expected_cluster_capacity(campaign(0.5, 20000, 45), 1), NumericalError);
}

TEST_CASE("scans at zero activity and the adjacent two-point bound") {
  const auto arm = one_arm_scan(campaign(0.0, 5000, 46), {2, 4}, 0);
  for (const auto& row : arm.rows) CHECK(row.est.value == 0.0);
  const auto tp0 = two_point_scan(campaign(0.0, 5000, 47), {1, 3}, 0);
  for (const auto& row : tp0.rows) CHECK(row.est.value == 0.0);

  // the two length-2 loops on {0, e_1} have total mass 2 * (1/2) (2d)^{-2}
  const double alpha = 0.2;
  const auto tp = two_point_scan(campaign(alpha, 100000, 48), {1}, 0);
  const double bound = 1.0 - std::exp(-alpha / 100.0);
  CHECK(tp.rows[0].est.value > bound);
  CHECK(tp.rows[0].ci_low > bound);
}

TEST_CASE("one-arm scan: columns and localization") {
  const auto r = one_arm_scan(campaign(0.2, 100000, 49), {2, 3}, 20000);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(row.est.value > 0.0);
    CHECK(row.ci_low <= row.est.value);
    CHECK(row.est.value <= row.ci_high);
    CHECK(row.scaled == doctest::Approx(row.est.value * std::pow(row.param, 3)));
    CHECK(std::isfinite(row.reference));
    CHECK(row.ratio == doctest::Approx(row.est.value / row.reference));
    CHECK(row.est.diag.tail_bound == d5().table.tail_bound);
  }
  CHECK(r.rows[1].est.value < r.rows[0].est.value);
  bool has_loc = false;
  for (const auto& [k, v] : r.summary) {
    if (k == "localization_frequency") {
      has_loc = true;
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(has_loc);
}

TEST_CASE("reproducibility and standard-error scaling") {
  const auto p = campaign(0.2, 40000, 50);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = one_arm_scan(p, {2}, 0);
  omp_set_num_threads(4);
  const auto b = one_arm_scan(p, {2}, 0);
  omp_set_num_threads(saved);
  CHECK(a.rows[0].est.value == b.rows[0].est.value);
  CHECK(a.rows[0].est.std_error == b.rows[0].est.std_error);

  // four times the samples halves the standard error
  auto q = p;
  q.samples = 4 * p.samples;
  const auto c = one_arm_scan(q, {2}, 0);
  const double ratio = c.rows[0].est.std_error / a.rows[0].est.std_error;
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("Mecke and FKG suites") {
  const auto t = build_length_table(3, 6);
  MeckeParams mp;
  mp.table = &t;
  mp.samples = 20000;
  mp.seed = 51;
  const auto mecke = verify_mecke(mp);
  CHECK(mecke.checks.size() == 5);
  for (const auto& c : mecke.checks) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }

  FkgParams fp;
  fp.table = &t;
  fp.samples = 5000;
  fp.seed = 52;
  const auto fkg = verify_fkg(fp);
  CHECK(fkg.passed());

  fp.alpha = 0.0;
  const auto degenerate = verify_fkg(fp);
  CHECK(degenerate.passed());
  for (const auto& c : degenerate.checks) CHECK(c.observed == 0.0);
}

TEST_CASE("lemma scans") {
  const GreenTable g3(3);
  LemmaParams lp;
  lp.dim = 3;
  lp.green = &g3;
  lp.samples = 100000;
  lp.seed = 53;
  lp.grid = {4};
  const auto two = lemma_scan(LemmaKind::kTwoSets, lp);
  double exact = kNaN;
  for (const auto& [k, v] : two.rows[0].est.diag.extra) {
    if (k == "exact_first_term") exact = v;
  }
  const double gx = g3(make_point({4, 0, 0}));
  CHECK(exact == doctest::Approx(std::pow(gx / g3.at_origin(), 2)).epsilon(1e-12));
  CHECK(std::abs(two.rows[0].est.value - exact) < 3.0 * two.rows[0].est.std_error);

  lp.grid = {5};
  const auto single = lemma_scan(LemmaKind::kSingleLoop, lp);
  CHECK(single.rows[0].ratio > 0.8);
  CHECK(single.rows[0].ratio < 1.3);

  lp.grid = {4, 8};
  lp.far_point = 2;
  const auto far = lemma_scan(LemmaKind::kFarConnect, lp);
  for (const auto& row : far.rows) {
    CHECK(row.est.value > 0.0);
    CHECK(std::isfinite(row.scaled));
  }
  lp.grid = {2};
  CHECK_THROWS_AS(lemma_scan(LemmaKind::kFarConnect, lp), InvalidArgument);

  const auto t5 = build_length_table(5, 200);
  const GreenTable g5(5);
  LemmaParams sp;
  sp.dim = 5;
  sp.green = &g5;
  sp.table = &t5;
  sp.alpha = 2.0;
  sp.short_m = 2;
  sp.grid = {2, 3, 4};
  sp.samples = 100000;
  sp.seed = 54;
  const auto sl = lemma_scan(LemmaKind::kShortLoops, sp);
  CHECK(sl.rows[1].est.value < sl.rows[0].est.value);
  CHECK(sl.rows[2].est.value < sl.rows[1].est.value);
  double slope = 0.0;
  for (const auto& [k, v] : sl.summary) {
    if (k == "slope") slope = v;
  }
  CHECK(slope < -1.0);

  CHECK(parse_lemma_kind("two_sets") == LemmaKind::kTwoSets);
  CHECK(to_string(LemmaKind::kShortLoops) == "short_loops");
  CHECK_THROWS_AS(parse_lemma_kind("bogus"), InvalidArgument);
}
