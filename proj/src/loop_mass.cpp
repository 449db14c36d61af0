#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/walk.hpp"

namespace loopsoup {

namespace {

constexpr uint64_t kChunk = 2048;

class PointLookup {
 public:
  explicit PointLookup(const std::vector<Point>& pts) : pts_(pts), set_(pts.begin(), pts.end()) {
    for (const auto& p : pts) {
      lo2_ = std::min(lo2_, norm2(p));
      hi2_ = std::max(hi2_, norm2(p));
    }
  }
  bool contains(const Point& p) const { return contains(p, norm2(p)); }
  // r2 = |p|^2 rules out almost every step before any comparison
  bool contains(const Point& p, int64_t r2) const {
    if (r2 < lo2_ || r2 > hi2_) return false;
    if (pts_.size() <= 8) return std::find(pts_.begin(), pts_.end(), p) != pts_.end();
    return set_.count(p) != 0;
  }
  std::size_t size() const { return pts_.size(); }
  const Point& front() const { return pts_.front(); }

 private:
  std::vector<Point> pts_;
  std::unordered_set<Point, PointHash> set_;
  int64_t lo2_ = std::numeric_limits<int64_t>::max();
  int64_t hi2_ = -1;
};

// inner boundary test of a ball centred at the kill centre, using the
// incrementally tracked r2 = |pos - centre|^2
struct SphereHit {
  Point center;
  int64_t radius2;
  int64_t pre2;  // (radius - 1)^2: nothing closer can be on the boundary
  bool operator()(const Point& pos, int64_t r2) const {
    if (r2 <= pre2 || r2 > radius2) return false;
    return r2 + 2 * max_abs_coord(pos - center) + 1 > radius2;
  }
};

SphereHit make_sphere_hit(const Box& b) {
  const int64_t r = b.radius;
  return {b.center, r * r, (r - 1) * (r - 1)};
}

struct Score {
  double value, lower, upper;
};

}  // namespace

int64_t default_kill_radius(const ConnectParams& p) {
  double scale = 1.0;
  for (const auto& x : p.sources) scale = std::max(scale, norm(x));
  for (const auto& x : p.target_points) scale = std::max(scale, norm(x));
  if (p.target_sphere) scale = std::max(scale, p.target_sphere->radius + norm(p.target_sphere->center));
  if (p.detour) scale = std::max(scale, p.detour->radius + norm(p.detour->center));
  return static_cast<int64_t>(std::ceil(4 * scale));
}

Estimate loop_mass_connect(const GreenTable& green, const ConnectParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  const int d = params.dim;
  if (d != green.dim()) throw InvalidArgument("loop_mass_connect: Green table dimension mismatch");
  if (params.sources.empty()) throw InvalidArgument("loop_mass_connect: empty source set");
  if (params.target_sphere.has_value() == !params.target_points.empty()) {
    throw InvalidArgument("loop_mass_connect: give exactly one of target_points / target_sphere");
  }
  if (params.samples == 0) throw InvalidArgument("loop_mass_connect: zero samples");

  std::vector<Point> sources = params.sources;
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());

  const PointLookup target_lookup(params.target_points);
  for (const auto& x : sources) {
    if (params.target_sphere) {
      const Box& b = *params.target_sphere;
      if (!b.contains(x) || on_ball_boundary(x, b)) {
        throw InvalidArgument("loop_mass_connect: sources must lie strictly inside the target sphere");
      }
    } else if (target_lookup.contains(x)) {
      throw InvalidArgument("loop_mass_connect: source and target sets intersect");
    }
    if (params.detour && (!params.detour->contains(x) || on_ball_boundary(x, *params.detour))) {
      throw InvalidArgument("loop_mass_connect: sources must lie strictly inside the detour ball");
    }
  }

  const int64_t kill = params.kill_radius > 0 ? params.kill_radius : default_kill_radius(params);
  const int64_t kill2 = kill * kill;
  const Point center{};
  const double g0 = green.at_origin();

  const bool single_source = sources.size() == 1;
  const bool single_target = !params.target_sphere && params.target_points.size() == 1;
  const PointLookup source_lookup(sources);

  // escape points sit in the shell kill^2 < |y|^2 <= (kill+1)^2
  green.prefill_shell(kill2, (kill + 1) * (kill + 1));

  std::optional<CapacityResult> target_cap;
  if (!params.target_sphere && !single_target) target_cap = capacity(green, params.target_points);

  std::optional<SphereHit> sphere;
  if (params.target_sphere) {
    if (params.target_sphere->center != center) {
      throw InvalidArgument("loop_mass_connect: target sphere must be centred at the origin");
    }
    sphere = make_sphere_hit(*params.target_sphere);
  }
  std::optional<SphereHit> detour;
  if (params.detour) {
    if (params.detour->center != center) {
      throw InvalidArgument("loop_mass_connect: detour ball must be centred at the origin");
    }
    detour = make_sphere_hit(*params.detour);
  }

  auto in_target = [&](const Point& p, int64_t r2) {
    return sphere ? (*sphere)(p, r2) : target_lookup.contains(p, r2);
  };

  auto one_walk = [&](const Point& x, Rng& rng) -> Score {
    Point pos = x;
    if (detour) {
      bool hit_target_first = false;
      walk_until(pos, d, center, kill2, rng, [&](const Point& p, int64_t r2) {
        if (in_target(p, r2)) {
          hit_target_first = true;
          return true;
        }
        return (*detour)(p, r2);
      });
      if (hit_target_first) return {0, 0, 0};
    }
    // leg 1: to the target
    if (!in_target(pos, dist2(pos, center)) &&
        !walk_until(pos, d, center, kill2, rng, in_target)) {
      if (single_target) {
        const Point& z = params.target_points.front();
        const double to_target = green(pos - z) / g0;
        const double back = green(z - x) / g0;
        if (single_source) return {to_target * back, to_target * back, to_target * back};
        return {0.5 * to_target * back, 0.0, to_target * back};
      }
      double upper = 0.0;
      if (target_cap) {
        double back = 0.0;
        for (const auto& z : params.target_points) back = std::max(back, green(z - x) / g0);
        upper = hitting_probability(green, pos, *target_cap) * back;
      }
      return {0.5 * upper, 0.0, upper};
    }
    // leg 2: back to the sources
    const bool returned = walk_until(pos, d, center, kill2, rng,
                                     [&](const Point& p, int64_t r2) { return source_lookup.contains(p, r2); });
    if (returned) {
      const double s = pos == x ? 1.0 : 0.0;
      return {s, s, s};
    }
    const double w = green(pos - x) / g0;
    if (single_source) return {w, w, w};
    return {0.5 * w, 0.0, w};
  };

  struct Acc {
    RunningStats value, lower, upper;
  };
  const uint64_t chunks = (params.samples + kChunk - 1) / kChunk;
  const std::size_t jobs = sources.size() * chunks;
  std::vector<Acc> acc(jobs);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t job = 0; job < static_cast<std::ptrdiff_t>(jobs); ++job) {
    const std::size_t si = static_cast<std::size_t>(job) / chunks;
    const uint64_t c = static_cast<uint64_t>(job) % chunks;
    Rng rng = Rng::stream(params.seed, {static_cast<uint64_t>(si), c});
    const uint64_t n = std::min(kChunk, params.samples - c * kChunk);
    Acc& a = acc[static_cast<std::size_t>(job)];
    for (uint64_t i = 0; i < n; ++i) {
      const Score s = one_walk(sources[si], rng);
      a.value.add(s.value);
      a.lower.add(s.lower);
      a.upper.add(s.upper);
    }
  }

  Estimate est;
  est.seed = params.seed;
  double var = 0.0;
  for (std::size_t si = 0; si < sources.size(); ++si) {
    Acc total;
    for (uint64_t c = 0; c < chunks; ++c) {
      const Acc& a = acc[si * chunks + c];
      total.value.merge(a.value);
      total.lower.merge(a.lower);
      total.upper.merge(a.upper);
    }
    est.value += total.value.mean();
    est.diag.lower += total.lower.mean();
    est.diag.upper += total.upper.mean();
    est.samples += total.value.count();
    var += total.value.std_error() * total.value.std_error();
  }
  est.std_error = std::sqrt(var);

  // n >= 2 terms: each extra excursion must return from L to K, which costs at
  // most q = max_{y in L} P_y(H_K < inf)
  const CapacityResult source_cap = capacity(green, sources);
  double q = 0.0;
  const std::vector<Point> targets =
      sphere ? ball_boundary(*params.target_sphere, d) : params.target_points;
  for (const auto& y : targets) q = std::max(q, hitting_probability(green, y, source_cap));
  q = std::min(q, 1.0 - 1e-15);
  est.diag.correction_bound = static_cast<double>(sources.size()) * (-std::log1p(-q) - q);
  est.diag.extra.emplace_back("return_ratio_max", q);
  est.diag.extra.emplace_back("kill_radius", static_cast<double>(kill));
  est.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return est;
}

Estimate loop_range_stats(const LengthTable& table, const RangeParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  if (params.samples == 0) throw InvalidArgument("loop_range_stats: zero samples");
  if (params.long_fraction < 0 || params.long_fraction >= 1) {
    throw InvalidArgument("loop_range_stats: long_fraction must lie in [0, 1)");
  }
  const int H = table.max_length / 2;
  const double beta = params.long_fraction;

  // log-uniform component over h = 1..H
  std::vector<double> log_cdf(static_cast<std::size_t>(H));
  double harmonic = 0.0;
  for (int h = 1; h <= H; ++h) {
    harmonic += 1.0 / h;
    log_cdf[static_cast<std::size_t>(h - 1)] = harmonic;
  }
  for (auto& c : log_cdf) c /= harmonic;
  log_cdf.back() = 1.0;

  auto proposal = [&](int k) {
    const int h = k / 2;
    return (1 - beta) * table.w(k) / table.per_vertex_mass + beta * (1.0 / h) / harmonic;
  };

  struct Acc {
    RatioStats ratio;
    uint64_t accepted = 0;
  };
  const uint64_t chunks = (params.samples + kChunk - 1) / kChunk;
  std::vector<Acc> acc(chunks);
  const Point origin{};
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    Rng rng = Rng::stream(params.seed, {static_cast<uint64_t>(c)});
    const uint64_t n = std::min(kChunk, params.samples - static_cast<uint64_t>(c) * kChunk);
    Acc& a = acc[static_cast<std::size_t>(c)];
    for (uint64_t i = 0; i < n; ++i) {
      int k;
      if (rng.uniform() < beta) {
        const auto it = std::upper_bound(log_cdf.begin(), log_cdf.end(), rng.uniform());
        k = 2 * (static_cast<int>(it - log_cdf.begin()) + 1);
      } else {
        k = sample_length(table, rng);
      }
      const Loop loop = sample_bridge(origin, k, table, rng);
      if (!loop.diameter_exceeds(params.min_diameter)) {
        a.ratio.add(0.0, 0.0);
        continue;
      }
      ++a.accepted;
      const double range = static_cast<double>(loop.range().size());
      const double q = proposal(k);
      if (params.route == RangeRoute::kTranslation) {
        const double wt = table.w(k) / q * range;
        a.ratio.add(wt * range, wt);
      } else {
        const double wt = table.p(k) / q / static_cast<double>(loop.visit_count(origin));
        a.ratio.add(wt * range, wt);
      }
    }
  }
  Acc total;
  for (const auto& a : acc) {
    total.ratio.merge(a.ratio);
    total.accepted += a.accepted;
  }
  if (total.accepted < 100) {
    throw NumericalError("loop_range_stats: only " + std::to_string(total.accepted) +
                         " samples with diameter > " + std::to_string(params.min_diameter) +
                         "; increase the sample budget");
  }
  Estimate est;
  est.value = total.ratio.ratio();
  est.std_error = total.ratio.std_error();
  est.samples = total.ratio.count();
  est.seed = params.seed;
  est.diag.tail_bound = table.tail_bound;
  est.diag.max_length = table.max_length;
  const double m = params.min_diameter;
  est.diag.extra.emplace_back("accepted", static_cast<double>(total.accepted));
  if (m > 0) est.diag.extra.emplace_back("ratio_m2", est.value / (m * m));
  est.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return est;
}

}  // namespace loopsoup
