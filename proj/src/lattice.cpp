#include "loopsoup/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace loopsoup {

void require_dim(int d, int min_dim) {
  if (d < min_dim || d > kMaxDim) {
    throw InvalidArgument("dimension " + std::to_string(d) + " outside [" +
                          std::to_string(min_dim) + ", " + std::to_string(kMaxDim) + "]");
  }
}

Point make_point(std::initializer_list<int32_t> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InvalidArgument("too many coordinates");
  }
  Point p;
  std::copy(coords.begin(), coords.end(), p.c.begin());
  return p;
}

Point unit_vector(int axis, int sign) {
  Point p;
  p[axis] = sign;
  return p;
}

Point operator+(Point a, const Point& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] += b[i];
  return a;
}

Point operator-(Point a, const Point& b) {
  for (int i = 0; i < kMaxDim; ++i) a[i] -= b[i];
  return a;
}

int64_t norm2(const Point& p) {
  int64_t s = 0;
  for (int32_t v : p.c) s += static_cast<int64_t>(v) * v;
  return s;
}

double norm(const Point& p) { return std::sqrt(static_cast<double>(norm2(p))); }

int64_t dist2(const Point& a, const Point& b) {
  int64_t s = 0;
  for (int i = 0; i < kMaxDim; ++i) {
    const int64_t v = static_cast<int64_t>(a[i]) - b[i];
    s += v * v;
  }
  return s;
}

int32_t max_abs_coord(const Point& p) {
  int32_t m = 0;
  for (int32_t v : p.c) m = std::max(m, std::abs(v));
  return m;
}

Point canonical(const Point& p) {
  Point q = p;
  for (auto& v : q.c) v = std::abs(v);
  // descending, so zero padding stays at the tail
  std::sort(q.c.begin(), q.c.end(), std::greater<>{});
  return q;
}

std::array<Point, 2 * kMaxDim> neighbors(const Point& p, int d) {
  std::array<Point, 2 * kMaxDim> out{};
  for (int i = 0; i < d; ++i) {
    out[2 * i] = p;
    out[2 * i][i] += 1;
    out[2 * i + 1] = p;
    out[2 * i + 1][i] -= 1;
  }
  return out;
}

std::string to_string(const Point& p, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) {
    if (i) s += ',';
    s += std::to_string(p[i]);
  }
  return s + ")";
}

namespace {

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t hash_point(const Point& p, uint64_t h) {
  for (int i = 0; i < kMaxDim; i += 2) {
    const uint64_t lo = static_cast<uint32_t>(p[i]);
    const uint64_t hi = static_cast<uint32_t>(p[i + 1]);
    h = mix64(h ^ (lo | (hi << 32)));
  }
  return h;
}

}  // namespace

std::size_t PointHash::operator()(const Point& p) const noexcept {
  return static_cast<std::size_t>(hash_point(p, 0x9e3779b97f4a7c15ULL));
}

Edge::Edge(const Point& a, const Point& b) : lo_(std::min(a, b)), hi_(std::max(a, b)) {
  if (dist2(a, b) != 1) {
    throw InvalidArgument("edge endpoints are not nearest neighbours");
  }
}

std::size_t EdgeHash::operator()(const Edge& e) const noexcept {
  return static_cast<std::size_t>(hash_point(e.hi(), hash_point(e.lo(), 0x2545f4914f6cdd1dULL)));
}

namespace {

void enumerate_ball(const Box& box, int d, int axis, Point& cur, int64_t used,
                    std::vector<Point>& out) {
  const int64_t r2 = static_cast<int64_t>(box.radius) * box.radius;
  if (axis == d) {
    out.push_back(cur);
    return;
  }
  const int32_t c = box.center[axis];
  for (int32_t v = -box.radius; v <= box.radius; ++v) {
    const int64_t u = used + static_cast<int64_t>(v) * v;
    if (u > r2) continue;
    cur[axis] = c + v;
    enumerate_ball(box, d, axis + 1, cur, u, out);
  }
  cur[axis] = c;
}

}  // namespace

std::vector<Point> ball_points(const Box& box, int d) {
  require_dim(d);
  if (box.radius < 0) throw InvalidArgument("negative radius");
  std::vector<Point> out;
  Point cur = box.center;
  enumerate_ball(box, d, 0, cur, 0, out);
  return out;
}

std::size_t ball_size(const Box& box, int d) {
  // counts r^2 representations per axis without materializing points
  require_dim(d);
  const int64_t r = box.radius;
  std::vector<std::size_t> ways(static_cast<std::size_t>(r * r + 1), 0);
  ways[0] = 1;
  for (int axis = 0; axis < d; ++axis) {
    std::vector<std::size_t> next(ways.size(), 0);
    for (std::size_t s = 0; s < ways.size(); ++s) {
      if (!ways[s]) continue;
      for (int64_t v = -r; v <= r; ++v) {
        const std::size_t t = s + static_cast<std::size_t>(v * v);
        if (t < next.size()) next[t] += ways[s];
      }
    }
    ways = std::move(next);
  }
  std::size_t total = 0;
  for (auto w : ways) total += w;
  return total;
}

bool on_ball_boundary(const Point& x, const Box& box) {
  const Point rel = x - box.center;
  const int64_t n2 = norm2(rel);
  const int64_t r2 = static_cast<int64_t>(box.radius) * box.radius;
  if (n2 > r2) return false;
  // the neighbour farthest from the center moves along the largest |coordinate|
  const int64_t m = max_abs_coord(rel);
  return n2 + 2 * m + 1 > r2;
}

std::vector<Point> ball_boundary(const Box& box, int d) {
  if (box.radius == 0) return {box.center};
  std::vector<Point> out;
  for (const auto& p : ball_points(box, d)) {
    if (on_ball_boundary(p, box)) out.push_back(p);
  }
  return out;
}

double dist_sets(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("empty set");
  int64_t best = std::numeric_limits<int64_t>::max();
  for (const auto& x : a) {
    for (const auto& y : b) best = std::min(best, dist2(x, y));
  }
  return std::sqrt(static_cast<double>(best));
}

double set_diameter(std::span<const Point> pts) {
  int64_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, dist2(pts[i], pts[j]));
  }
  return std::sqrt(static_cast<double>(best));
}

}  // namespace loopsoup
