#include "loopsoup/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "loopsoup/percolation.hpp"
#include "loopsoup/soup.hpp"

namespace loopsoup {

namespace {

constexpr uint64_t kReplicaChunk = 4096;

// stream tags, one per campaign type
enum : uint64_t {
  kTagCapacity = 1,
  kTagOneLoop,
  kTagCapacityAlpha,
  kTagOneArm,
  kTagTwoPoint,
  kTagMecke,
  kTagFkg,
  kTagLemma,
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> keys) { return Rng::stream(seed, keys)(); }

/// Runs fn(rng, acc) for `samples` replicas in fixed chunks, each chunk with
/// its own stream, and merges the per-chunk accumulators in chunk order.
template <class Acc, class Fn>
Acc run_replicas(uint64_t samples, uint64_t stream_seed, Fn&& fn) {
  const uint64_t chunks = (samples + kReplicaChunk - 1) / kReplicaChunk;
  std::vector<Acc> parts(chunks);
  std::exception_ptr error;
  std::mutex error_mu;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    try {
      const auto cu = static_cast<uint64_t>(c);
      Rng rng = Rng::stream(stream_seed, {cu});
      const uint64_t lo = cu * kReplicaChunk;
      const uint64_t hi = std::min(samples, lo + kReplicaChunk);
      for (uint64_t i = lo; i < hi; ++i) fn(rng, parts[cu], i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  Acc total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

/// True once a vertex is no longer interior to B_n.
std::function<bool(const Point&)> sphere_stop(int n) {
  const Box b{Point{}, n};
  const int64_t pre = static_cast<int64_t>(n - 1) * (n - 1);
  return [b, pre](const Point& v) {
    if (norm2(v) <= pre) return false;
    return !b.contains(v) || on_ball_boundary(v, b);
  };
}

double cluster_capacity(const GreenTable& g, const std::vector<Point>& v) {
  if (v.size() == 1) return 1.0 / g.at_origin();
  return capacity(g, v).cap;
}

void require_campaign(const CampaignParams& p) {
  require_dim(p.dim, 3);
  if (p.table == nullptr || p.green == nullptr) throw InvalidArgument("campaign: missing length or Green table");
  if (p.table->dim != p.dim || p.green->dim() != p.dim) throw InvalidArgument("campaign: table dimension mismatch");
  if (!(p.alpha >= 0.0)) throw InvalidArgument("campaign: alpha must be >= 0");
  if (p.samples == 0) throw InvalidArgument("campaign: zero samples");
}

struct Binomial {
  uint64_t n = 0, k = 0;
  void merge(const Binomial& o) {
    n += o.n;
    k += o.k;
  }
};

void fill_binomial_row(ScanRow& row, uint64_t k, uint64_t n, double power) {
  const double p = static_cast<double>(k) / static_cast<double>(n);
  row.est.value = p;
  row.est.std_error = std::sqrt(p * (1 - p) / static_cast<double>(n));
  row.est.samples = n;
  const auto [lo, hi] = clopper_pearson(k, n);
  row.ci_low = lo;
  row.ci_high = hi;
  row.scaled = power * p;
  row.scaled_se = power * row.est.std_error;
  row.est.diag.extra.emplace_back("successes", static_cast<double>(k));
}

void fill_normal_row(ScanRow& row) {
  row.ci_low = row.est.value - 1.96 * row.est.std_error;
  row.ci_high = row.est.value + 1.96 * row.est.std_error;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Whether dropping a single loop leaves the origin's cluster inside B_k.
bool localized_by_one_removal(const std::vector<Loop>& loops, int k) {
  const Box b{Point{}, k};
  std::unordered_map<Point, std::vector<std::size_t>, PointHash> at;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    for (const auto& p : loops[i].trace) {
      auto& v = at[p];
      if (v.empty() || v.back() != i) v.push_back(i);
    }
  }
  for (std::size_t skip = 0; skip < loops.size(); ++skip) {
    std::vector<char> used(loops.size(), 0);
    std::unordered_set<Point, PointHash> seen{Point{}};
    std::queue<Point> todo;
    todo.push(Point{});
    bool inside = true;
    while (!todo.empty() && inside) {
      const Point v = todo.front();
      todo.pop();
      const auto it = at.find(v);
      if (it == at.end()) continue;
      for (std::size_t li : it->second) {
        if (li == skip || used[li]) continue;
        used[li] = 1;
        for (const auto& p : loops[li].trace) {
          if (!b.contains(p)) {
            inside = false;
            break;
          }
          if (seen.insert(p).second) todo.push(p);
        }
        if (!inside) break;
      }
    }
    if (inside) return true;
  }
  return false;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

// ---------------------------------------------------------------------------
// Cluster capacity

Estimate expected_cluster_capacity(const CampaignParams& p, int window_radius) {
  require_campaign(p);
  if (window_radius < 1) throw InvalidArgument("expected_cluster_capacity: window radius must be >= 1");
  const auto t0 = Clock::now();
  struct Acc {
    RunningStats cap;
    RunningStats size;
    uint64_t touches = 0;
    void merge(const Acc& o) {
      cap.merge(o.cap);
      size.merge(o.size);
      touches += o.touches;
    }
  };
  ExploreParams ep;
  ep.alpha = p.alpha;
  ep.table = p.table;
  ep.stop = sphere_stop(window_radius);
  const Acc acc = run_replicas<Acc>(p.samples, derive_seed(p.seed, {kTagCapacity}), [&](Rng& rng, Acc& a, uint64_t) {
    const ExploredCluster c = explore_origin_cluster(ep, rng);
    if (c.stopped) ++a.touches;
    a.cap.add(cluster_capacity(*p.green, c.vertices));
    a.size.add(static_cast<double>(c.vertices.size()));
  });
  Estimate e = make_estimate(acc.cap, p.seed);
  e.diag.tail_bound = p.table->tail_bound;
  e.diag.max_length = p.table->max_length;
  e.diag.boundary_touch_rate = static_cast<double>(acc.touches) / static_cast<double>(p.samples);
  e.diag.lower = e.value;
  e.diag.upper = acc.touches == 0 ? e.value : kNaN;
  e.diag.extra.emplace_back("mean_cluster_size", acc.size.mean());
  e.diag.extra.emplace_back("window_radius", window_radius);
  e.wall_seconds = seconds_since(t0);
  if (e.diag.boundary_touch_rate >= 0.01) {
    throw NumericalError("expected_cluster_capacity: boundary touch rate " + fmt_double(e.diag.boundary_touch_rate) +
                         " >= 1%; use a larger window");
  }
  return e;
}

Estimate one_loop_capacity_slope(const LengthTable& table, const GreenTable& green, uint64_t samples, uint64_t seed) {
  if (table.dim != green.dim()) throw InvalidArgument("one_loop_capacity_slope: dimension mismatch");
  const auto t0 = Clock::now();
  const double cap0 = 1.0 / green.at_origin();
  struct Acc {
    RunningStats s;
    void merge(const Acc& o) { s.merge(o.s); }
  };
  const Point origin{};
  const Acc acc = run_replicas<Acc>(samples, derive_seed(seed, {kTagOneLoop}), [&](Rng& rng, Acc& a, uint64_t) {
    const Loop loop = sample_bridge(origin, sample_length(table, rng), table, rng);
    const auto r = loop.range();
    a.s.add(table.per_vertex_mass * static_cast<double>(r.size()) * (capacity(green, r).cap - cap0));
  });
  Estimate e = make_estimate(acc.s, seed);
  e.diag.tail_bound = table.tail_bound;
  e.diag.max_length = table.max_length;
  e.wall_seconds = seconds_since(t0);
  return e;
}

CapacityLimit capacity_alpha_limit(CampaignParams p, const std::vector<double>& alphas, int window_radius,
                                   int degree) {
  if (alphas.size() < static_cast<std::size_t>(degree) + 1) {
    throw InvalidArgument("capacity_alpha_limit: need at least degree + 1 activities");
  }
  CapacityLimit out;
  out.alphas = alphas;
  std::vector<double> y, se;
  const uint64_t seed = p.seed;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0)) throw InvalidArgument("capacity_alpha_limit: activities must be positive");
    p.alpha = alphas[i];
    p.seed = derive_seed(seed, {kTagCapacityAlpha, i});
    out.estimates.push_back(expected_cluster_capacity(p, window_radius));
    y.push_back(out.estimates.back().value);
    se.push_back(out.estimates.back().std_error);
  }
  out.fit = weighted_poly_fit(alphas, y, se, degree);
  out.reference = 1.0 / p.green->at_origin();
  out.z = (out.fit.coef[0] - out.reference) / out.fit.coef_se[0];
  return out;
}

// ---------------------------------------------------------------------------
// One-arm and two-point scans

namespace {

void add_common_params(ScanResult& r, const CampaignParams& p) {
  r.params = {{"dim", std::to_string(p.dim)},
              {"alpha", fmt_double(p.alpha)},
              {"lmax", std::to_string(p.table->max_length)},
              {"samples", std::to_string(p.samples)},
              {"seed", std::to_string(p.seed)},
              {"tail_bound", fmt_double(p.table->tail_bound)},
              {"per_vertex_mass", fmt_double(p.table->per_vertex_mass)}};
}

}  // namespace

ScanResult one_arm_scan(const CampaignParams& p, const std::vector<int>& n_list, uint64_t capacity_samples) {
  require_campaign(p);
  if (n_list.empty()) throw InvalidArgument("one_arm_scan: empty n list");
  ScanResult out;
  out.kind = "one_arm";
  add_common_params(out, p);
  const int d = p.dim;
  const double cd = green_constant(d);
  const int n_max = *std::max_element(n_list.begin(), n_list.end());

  double ecap = kNaN, ecap_se = kNaN;
  if (capacity_samples > 0) {
    CampaignParams cp = p;
    cp.samples = capacity_samples;
    const Estimate e = expected_cluster_capacity(cp, 4 * n_max);
    ecap = e.value;
    ecap_se = e.std_error;
    out.summary.emplace_back("expected_capacity", ecap);
    out.summary.emplace_back("expected_capacity_se", ecap_se);
    out.summary.emplace_back("expected_capacity_touch_rate", e.diag.boundary_touch_rate);
  }

  uint64_t loc_total = 0, loc_hits = 0;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const int n = n_list[i];
    if (n < 1) throw InvalidArgument("one_arm_scan: n must be >= 1");
    const auto t0 = Clock::now();
    struct Acc {
      uint64_t n = 0, k = 0, stopped = 0, complete_hits = 0, localized = 0;
      void merge(const Acc& o) {
        n += o.n;
        k += o.k;
        stopped += o.stopped;
        complete_hits += o.complete_hits;
        localized += o.localized;
      }
    };
    ExploreParams ep;
    ep.alpha = p.alpha;
    ep.table = p.table;
    ep.stop = sphere_stop(4 * n);
    const int k_loc = (n + 1) / 2;
    const Acc acc = run_replicas<Acc>(p.samples, derive_seed(p.seed, {kTagOneArm, static_cast<uint64_t>(n)}),
                                      [&](Rng& rng, Acc& a, uint64_t) {
                                        ++a.n;
                                        const ExploredCluster c = explore_origin_cluster(ep, rng);
                                        if (c.stopped) {
                                          ++a.stopped;
                                          ++a.k;
                                          return;
                                        }
                                        if (!reaches_sphere(c.vertices, n)) return;
                                        ++a.k;
                                        ++a.complete_hits;
                                        if (localized_by_one_removal(c.loops, k_loc)) ++a.localized;
                                      });
    ScanRow row;
    row.param = n;
    const double power = std::pow(static_cast<double>(n), d - 2);
    fill_binomial_row(row, acc.k, acc.n, power);
    row.est.seed = p.seed;
    row.est.diag.tail_bound = p.table->tail_bound;
    row.est.diag.max_length = p.table->max_length;
    row.est.diag.boundary_touch_rate = static_cast<double>(acc.stopped) / static_cast<double>(acc.n);
    row.est.diag.extra.emplace_back("localized", static_cast<double>(acc.localized));
    row.est.diag.extra.emplace_back("complete_successes", static_cast<double>(acc.complete_hits));
    if (!std::isnan(ecap)) {
      row.reference = p.alpha * cd * ecap / power;
      row.ratio = row.reference > 0 ? row.est.value / row.reference : kNaN;
    }
    row.est.wall_seconds = seconds_since(t0);
    loc_total += acc.complete_hits;
    loc_hits += acc.localized;
    out.rows.push_back(std::move(row));
  }
  out.summary.emplace_back("localization_frequency",
                           loc_total ? static_cast<double>(loc_hits) / static_cast<double>(loc_total) : kNaN);
  out.summary.emplace_back("localization_samples", static_cast<double>(loc_total));
  out.notes.push_back("clusters sampled by exact origin-cluster exploration in infinite volume");
  out.notes.push_back("localization: among successes with complete clusters, removing one loop leaves C_0 in B_ceil(n/2)");
  return out;
}

ScanResult two_point_scan(const CampaignParams& p, const std::vector<int>& r_list, uint64_t capacity_samples) {
  require_campaign(p);
  if (r_list.empty()) throw InvalidArgument("two_point_scan: empty list");
  ScanResult out;
  out.kind = "two_point";
  add_common_params(out, p);
  const int d = p.dim;
  const double cd = green_constant(d);
  const int r_max = *std::max_element(r_list.begin(), r_list.end());

  double ecap = kNaN;
  if (capacity_samples > 0) {
    CampaignParams cp = p;
    cp.samples = capacity_samples;
    const Estimate e = expected_cluster_capacity(cp, 4 * r_max);
    ecap = e.value;
    out.summary.emplace_back("expected_capacity", ecap);
    out.summary.emplace_back("expected_capacity_se", e.std_error);
  }
  for (int r : r_list) {
    if (r < 1) throw InvalidArgument("two_point_scan: |x| must be >= 1");
    const auto t0 = Clock::now();
    Point target{};
    target[0] = r;
    ExploreParams ep;
    ep.alpha = p.alpha;
    ep.table = p.table;
    ep.stop = [target](const Point& v) { return v == target; };
    const Binomial acc = run_replicas<Binomial>(
        p.samples, derive_seed(p.seed, {kTagTwoPoint, static_cast<uint64_t>(r)}), [&](Rng& rng, Binomial& a, uint64_t) {
          ++a.n;
          if (explore_origin_cluster(ep, rng).stopped) ++a.k;
        });
    ScanRow row;
    row.param = r;
    const double power = std::pow(static_cast<double>(r), 2 * d - 4);
    fill_binomial_row(row, acc.k, acc.n, power);
    row.est.seed = p.seed;
    row.est.diag.tail_bound = p.table->tail_bound;
    row.est.diag.max_length = p.table->max_length;
    if (!std::isnan(ecap)) {
      row.reference = p.alpha * cd * cd * ecap * ecap / power;
      row.ratio = row.reference > 0 ? row.est.value / row.reference : kNaN;
    }
    row.est.wall_seconds = seconds_since(t0);
    out.rows.push_back(std::move(row));
  }
  out.notes.push_back("clusters sampled by exact origin-cluster exploration in infinite volume");
  return out;
}

// ---------------------------------------------------------------------------
// Mecke and FKG suites

VerifyReport verify_mecke(const MeckeParams& p) {
  if (p.table == nullptr) throw InvalidArgument("verify_mecke: no length table");
  if (p.samples < 2 || p.draws_per_sample == 0) throw InvalidArgument("verify_mecke: sample budget too small");
  const int d = p.table->dim;
  const Box window{Point{}, p.window_radius};
  const std::vector<Point> roots = ball_points(window, d);
  const double md = p.table->per_vertex_mass;
  const double total_mass = md * static_cast<double>(roots.size());
  const double a_m = p.alpha * total_mass;
  const Point origin{};

  struct Acc {
    RunningStats l1, l2, l3, r2, r3, d2, d3;
    void merge(const Acc& o) {
      l1.merge(o.l1);
      l2.merge(o.l2);
      l3.merge(o.l3);
      r2.merge(o.r2);
      r3.merge(o.r3);
      d2.merge(o.d2);
      d3.merge(o.d3);
    }
  };
  const uint64_t soup_seed = derive_seed(p.seed, {kTagMecke, 0});
  const Acc acc = run_replicas<Acc>(p.samples, derive_seed(p.seed, {kTagMecke, 1}), [&](Rng& rng, Acc& a, uint64_t i) {
    SoupParams sp;
    sp.alpha = p.alpha;
    sp.dim = d;
    sp.window = window;
    sp.table = p.table;
    sp.seed = soup_seed;
    sp.replica = i;
    sp.enlarge = false;
    const Soup soup = sample_soup_serial(sp);
    const double n = static_cast<double>(soup.size());
    double n0 = 0;
    for (const auto& l : soup.loops()) n0 += l.root == origin ? 1.0 : 0.0;
    // right-hand side: loops from mu / M, independent of the soup
    double hits = 0;
    for (uint64_t j = 0; j < p.draws_per_sample; ++j) {
      const Point& root = roots[rng.below(roots.size())];
      (void)sample_length(*p.table, rng);
      hits += root == origin ? 1.0 : 0.0;
    }
    const double frac = hits / static_cast<double>(p.draws_per_sample);
    const double lhs2 = n0, lhs3 = n0 * (n - 1);
    const double rhs2 = a_m * frac, rhs3 = a_m * frac * n;
    a.l1.add(n);
    a.l2.add(lhs2);
    a.l3.add(lhs3);
    a.r2.add(rhs2);
    a.r3.add(rhs3);
    a.d2.add(lhs2 - rhs2);
    a.d3.add(lhs3 - rhs3);
  });

  VerifyReport rep;
  rep.suite = "mecke";
  auto add = [&](std::string name, double obs, double exp, double se, std::string note) {
    Check c;
    c.name = std::move(name);
    c.observed = obs;
    c.expected = exp;
    c.std_error = se;
    c.pass = std::abs(obs - exp) <= c.tolerance_sigmas * se || obs == exp;
    c.note = std::move(note);
    rep.checks.push_back(std::move(c));
  };
  add("constant", acc.l1.mean(), a_m, acc.l1.std_error(), "E[#loops] vs alpha M");
  add("root_at_origin", acc.l2.mean(), acc.r2.mean(), acc.d2.std_error(), "sum over loops of 1{root=0}, both sides sampled");
  add("root_at_origin_closed_form", acc.l2.mean(), p.alpha * md, acc.l2.std_error(), "vs alpha m_d");
  add("root_times_count", acc.l3.mean(), acc.r3.mean(), acc.d3.std_error(),
      "sum over loops of 1{root=0} #(eta minus loop), both sides sampled");
  add("root_times_count_closed_form", acc.l3.mean(), p.alpha * md * a_m, acc.l3.std_error(),
      "vs alpha m_d alpha M");
  return rep;
}

VerifyReport verify_fkg(const FkgParams& p) {
  if (p.table == nullptr) throw InvalidArgument("verify_fkg: no length table");
  if (p.samples < 2) throw InvalidArgument("verify_fkg: sample budget too small");
  const int d = p.table->dim;
  require_dim(d, 3);
  const int lmax = p.table->max_length;
  const Point origin{};
  const Point e1 = unit_vector(0), e2 = unit_vector(1);
  Point far{};
  far[0] = lmax + 2;
  const Edge near_a(origin, e1), near_b(origin, e2), far_b(far, far + e1);
  const Box window{origin, lmax + 3};

  constexpr int kPairs = 3;
  struct Acc {
    uint64_t n = 0;
    std::array<uint64_t, kPairs> a{}, b{}, ab{};
    void merge(const Acc& o) {
      n += o.n;
      for (int i = 0; i < kPairs; ++i) {
        a[i] += o.a[i];
        b[i] += o.b[i];
        ab[i] += o.ab[i];
      }
    }
  };
  const uint64_t soup_seed = derive_seed(p.seed, {kTagFkg, 0});
  const Acc acc = run_replicas<Acc>(p.samples, derive_seed(p.seed, {kTagFkg, 1}), [&](Rng&, Acc& acc_, uint64_t i) {
    SoupParams sp;
    sp.alpha = p.alpha;
    sp.dim = d;
    sp.window = window;
    sp.table = p.table;
    sp.seed = soup_seed;
    sp.replica = i;
    const Soup soup = sample_soup_serial(sp);
    const auto edges = soup.open_edges();
    const ClusterPartition part(edges);
    const std::array<bool, kPairs> ev_a{soup.is_open(near_a), reaches_sphere(part.component(origin), 2),
                                        soup.is_open(near_a)};
    const std::array<bool, kPairs> ev_b{soup.is_open(near_b), part.connected(origin, e1), soup.is_open(far_b)};
    ++acc_.n;
    for (int k = 0; k < kPairs; ++k) {
      acc_.a[k] += ev_a[k];
      acc_.b[k] += ev_b[k];
      acc_.ab[k] += ev_a[k] && ev_b[k];
    }
  });

  VerifyReport rep;
  rep.suite = "fkg";
  const char* names[kPairs] = {"perpendicular_edges", "one_arm2_and_two_point_e1", "far_edges"};
  const double n = static_cast<double>(acc.n);
  for (int k = 0; k < kPairs; ++k) {
    const double pa = acc.a[k] / n, pb = acc.b[k] / n, pab = acc.ab[k] / n;
    // influence function of P(AB) - P(A)P(B)
    const double m2 = pab + pb * pb * pa + pa * pa * pb - 2 * pb * pab - 2 * pa * pab + 2 * pa * pb * pab;
    const double m1 = pab - 2 * pa * pb;
    const double se = std::sqrt(std::max(m2 - m1 * m1, 0.0) / n);
    Check c;
    c.name = names[k];
    c.observed = pab;
    c.expected = pa * pb;
    c.std_error = se;
    c.pass = pab - pa * pb >= -c.tolerance_sigmas * se;
    c.note = "P(A and B) >= P(A) P(B) - 4 se";
    rep.checks.push_back(c);
  }
  Check ind = rep.checks.back();
  ind.name = "far_edges_independent";
  ind.pass = std::abs(ind.observed - ind.expected) <= ind.tolerance_sigmas * ind.std_error;
  ind.note = "edges " + std::to_string(lmax + 1) + " apart cannot share a loop";
  rep.checks.push_back(ind);
  return rep;
}

// ---------------------------------------------------------------------------
// Lemma scans

LemmaKind parse_lemma_kind(const std::string& s) {
  if (s == "single_loop") return LemmaKind::kSingleLoop;
  if (s == "two_sets") return LemmaKind::kTwoSets;
  if (s == "far_connect") return LemmaKind::kFarConnect;
  if (s == "short_loops") return LemmaKind::kShortLoops;
  throw InvalidArgument("unknown lemma kind '" + s + "' (single_loop, two_sets, far_connect, short_loops)");
}

std::string to_string(LemmaKind k) {
  switch (k) {
    case LemmaKind::kSingleLoop: return "single_loop";
    case LemmaKind::kTwoSets: return "two_sets";
    case LemmaKind::kFarConnect: return "far_connect";
    case LemmaKind::kShortLoops: return "short_loops";
  }
  return "unknown";
}

ScanResult lemma_scan(LemmaKind kind, const LemmaParams& p) {
  require_dim(p.dim, 3);
  if (p.green == nullptr || p.green->dim() != p.dim) throw InvalidArgument("lemma_scan: Green table missing or wrong dimension");
  if (p.grid.empty()) throw InvalidArgument("lemma_scan: empty grid");
  const int d = p.dim;
  const double cd = green_constant(d);
  const double g0 = p.green->at_origin();
  const double cap0 = 1.0 / g0;
  const Point origin{};

  ScanResult out;
  out.kind = to_string(kind);
  out.params = {{"dim", std::to_string(d)},
                {"samples", std::to_string(p.samples)},
                {"seed", std::to_string(p.seed)},
                {"kill_radius", std::to_string(p.kill_radius)}};

  auto connect = [&](std::size_t idx) {
    ConnectParams cp;
    cp.dim = d;
    cp.sources = {origin};
    cp.kill_radius = p.kill_radius;
    cp.samples = p.samples;
    cp.seed = derive_seed(p.seed, {kTagLemma, static_cast<uint64_t>(kind), idx});
    return cp;
  };

  if (kind == LemmaKind::kShortLoops) {
    if (p.table == nullptr || p.table->dim != d) throw InvalidArgument("lemma_scan: short_loops needs a length table");
    out.params.emplace_back("alpha", fmt_double(p.alpha));
    out.params.emplace_back("m", std::to_string(p.short_m));
    out.params.emplace_back("lmax", std::to_string(p.table->max_length));
    std::vector<double> xs, ys, ses;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
      const int n = p.grid[i];
      const auto t0 = Clock::now();
      ExploreParams ep;
      ep.alpha = p.alpha;
      ep.table = p.table;
      ep.stop = sphere_stop(n);
      ep.keep = diameter_at_most(p.short_m);
      const Binomial acc = run_replicas<Binomial>(
          p.samples, derive_seed(p.seed, {kTagLemma, static_cast<uint64_t>(kind), i}),
          [&](Rng& rng, Binomial& a, uint64_t) {
            ++a.n;
            if (explore_origin_cluster(ep, rng).stopped) ++a.k;
          });
      ScanRow row;
      row.param = n;
      fill_binomial_row(row, acc.k, acc.n, 1.0);
      row.scaled = static_cast<double>(n) / p.short_m;
      row.scaled_se = 0.0;
      row.est.seed = p.seed;
      row.est.diag.tail_bound = p.table->tail_bound;
      row.est.diag.max_length = p.table->max_length;
      row.est.wall_seconds = seconds_since(t0);
      if (acc.k > 0 && acc.k < acc.n) {
        xs.push_back(row.scaled);
        ys.push_back(std::log(row.est.value));
        ses.push_back(row.est.std_error / row.est.value);
      } else if (acc.k == 0) {
        row.est.diag.warnings.push_back("no successes; excluded from the decay fit");
      }
      out.rows.push_back(std::move(row));
    }
    if (xs.size() >= 2) {
      const LinearFit f = weighted_linear_fit(xs, ys, ses);
      out.summary.emplace_back("slope", f.slope);
      out.summary.emplace_back("slope_se", f.slope_se);
      out.summary.emplace_back("decay_factor_per_unit", std::exp(-f.slope));
    } else {
      out.notes.push_back("fewer than two rows with successes; no decay fit");
    }
    out.notes.push_back("scaled column holds n/m");
    return out;
  }

  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    const int g = p.grid[i];
    if (g < 1) throw InvalidArgument("lemma_scan: grid values must be >= 1");
    ScanRow row;
    row.param = g;
    ConnectParams cp = connect(i);
    switch (kind) {
      case LemmaKind::kSingleLoop: {
        cp.target_sphere = Box{origin, g};
        row.est = loop_mass_connect(*p.green, cp);
        row.reference = cd * cap0 * std::pow(g, 2.0 - d);
        row.scaled = row.est.value * std::pow(g, d - 2.0);
        row.scaled_se = row.est.std_error * std::pow(g, d - 2.0);
        break;
      }
      case LemmaKind::kTwoSets: {
        Point x{};
        x[0] = g;
        cp.target_points = {x};
        row.est = loop_mass_connect(*p.green, cp);
        row.reference = cd * cd * cap0 * cap0 * std::pow(g, 4.0 - 2 * d);
        const double exact = std::pow((*p.green)(x) / g0, 2);
        row.est.diag.extra.emplace_back("exact_first_term", exact);
        row.scaled = row.est.value * std::pow(g, 2.0 * d - 4);
        row.scaled_se = row.est.std_error * std::pow(g, 2.0 * d - 4);
        break;
      }
      case LemmaKind::kFarConnect: {
        if (g <= p.far_point) throw InvalidArgument("lemma_scan: far_connect needs m > |x|");
        Point x{};
        x[0] = p.far_point;
        cp.target_points = {x};
        cp.detour = Box{origin, g};
        row.est = loop_mass_connect(*p.green, cp);
        const double s = std::pow(g, d - 2.0) * std::pow(p.far_point, d - 2.0);
        row.scaled = row.est.value * s;
        row.scaled_se = row.est.std_error * s;
        break;
      }
      case LemmaKind::kShortLoops: break;
    }
    if (!std::isnan(row.reference)) row.ratio = row.est.value / row.reference;
    fill_normal_row(row);
    out.rows.push_back(std::move(row));
  }
  if (kind == LemmaKind::kFarConnect) {
    out.params.emplace_back("x", std::to_string(p.far_point));
    out.notes.push_back("far_connect: loops through 0 and x that reach dB_m in between; scaled = estimate m^{d-2} |x|^{d-2}");
  }
  out.notes.push_back("estimates are the first term of the connection mass; diag.correction_bound bounds the rest");
  return out;
}

}  // namespace loopsoup
