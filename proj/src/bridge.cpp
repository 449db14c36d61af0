#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "loopsoup/loopmeasure.hpp"

namespace loopsoup {

std::vector<Edge> Loop::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    out.emplace_back(trace[static_cast<std::size_t>(i)], trace[static_cast<std::size_t>(i) + 1]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Point> Loop::range() const {
  std::vector<Point> out(trace.begin(), trace.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double Loop::diameter() const {
  const auto r = range();
  return set_diameter(r);
}

bool Loop::diameter_exceeds(double m) const {
  if (m < 0) return true;
  const double m2 = m * m;
  auto far = [m2](const Point& a, const Point& b) { return static_cast<double>(dist2(a, b)) > m2; };
  // any coordinate extent above m settles it
  Point lo = trace.front(), hi = trace.front();
  for (const auto& p : trace) {
    for (int i = 0; i < kMaxDim; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  if (!far(lo, hi)) return false;
  for (int i = 0; i < kMaxDim; ++i) {
    if (hi[i] - lo[i] > m) return true;
  }
  const auto r = range();
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      if (far(r[i], r[j])) return true;
    }
  }
  return false;
}

bool Loop::visits(const Point& x) const { return std::find(trace.begin(), trace.end(), x) != trace.end(); }

std::size_t Loop::visit_count(const Point& x) const {
  if (trace.empty()) return 0;
  return static_cast<std::size_t>(std::count(trace.begin(), trace.end() - 1, x));
}

Loop sample_bridge(const Point& root, int k, const LengthTable& table, Rng& rng) {
  if (k < 2 || (k & 1) || k > table.max_length) {
    throw InvalidArgument("sample_bridge: length " + std::to_string(k) + " not even in [2, " +
                          std::to_string(table.max_length) + "]");
  }
  const int d = table.dim;
  const auto& lf = table.log_factorial;

  // coordinate step counts, last coordinate first
  std::array<int, kMaxDim> counts{};
  int rest = k;
  for (int j = d; j >= 2 && rest > 0; --j) {
    const double l_new = -std::log(static_cast<double>(j));
    const double l_old = std::log((j - 1.0) / j);
    const auto& prev = table.partial[static_cast<std::size_t>(j - 1)];
    const auto& q = table.partial[1];
    const double norm = std::log(table.partial[static_cast<std::size_t>(j)][static_cast<std::size_t>(rest / 2)]);
    const double u = rng.uniform();
    double acc = 0.0;
    int pick = rest;
    for (int m = 0; m <= rest; m += 2) {
      const double lt = lf[static_cast<std::size_t>(rest)] - lf[static_cast<std::size_t>(m)] -
                        lf[static_cast<std::size_t>(rest - m)] + m * l_new + (rest - m) * l_old +
                        std::log(q[static_cast<std::size_t>(m / 2)]) +
                        std::log(prev[static_cast<std::size_t>((rest - m) / 2)]) - norm;
      acc += std::exp(lt);
      if (u < acc) {
        pick = m;
        break;
      }
    }
    counts[static_cast<std::size_t>(j - 1)] = pick;
    rest -= pick;
  }
  counts[0] = rest;

  // n_j/2 steps +e_j and n_j/2 steps -e_j per coordinate, uniformly permuted
  std::vector<uint8_t> steps;
  steps.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < d; ++j) {
    const int half = counts[static_cast<std::size_t>(j)] / 2;
    for (int s = 0; s < half; ++s) {
      steps.push_back(static_cast<uint8_t>(2 * j));
      steps.push_back(static_cast<uint8_t>(2 * j + 1));
    }
  }
  for (std::size_t i = steps.size() - 1; i > 0; --i) {
    std::swap(steps[i], steps[rng.below(i + 1)]);
  }

  Loop loop;
  loop.root = root;
  loop.length = k;
  loop.trace.resize(static_cast<std::size_t>(k) + 1);
  Point cur = root;
  loop.trace[0] = cur;
  for (int i = 0; i < k; ++i) {
    const uint8_t s = steps[static_cast<std::size_t>(i)];
    cur[s >> 1] += 1 - 2 * (s & 1);
    loop.trace[static_cast<std::size_t>(i) + 1] = cur;
  }
  return loop;
}

bool loop_is_valid(const Loop& loop, int d) {
  if (loop.length < 2 || (loop.length & 1)) return false;
  if (loop.trace.size() != static_cast<std::size_t>(loop.length) + 1) return false;
  if (loop.trace.front() != loop.root || loop.trace.back() != loop.root) return false;
  for (std::size_t i = 0; i + 1 < loop.trace.size(); ++i) {
    if (dist2(loop.trace[i], loop.trace[i + 1]) != 1) return false;
    for (int a = d; a < kMaxDim; ++a) {
      if (loop.trace[i + 1][a] != 0) return false;
    }
  }
  return true;
}

}  // namespace loopsoup
