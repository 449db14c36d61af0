#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopsoup {

inline constexpr int kMaxDim = 8;

/// Raised for malformed input: bad dimensions, empty sets, out-of-window queries.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine cannot meet its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require_dim(int d, int min_dim = 1);

/// A vertex of Z^d. Coordinates beyond the run dimension are kept at zero, so
/// equality, ordering and hashing never need to know d.
struct Point {
  std::array<int32_t, kMaxDim> c{};

  int32_t& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  int32_t operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

Point make_point(std::initializer_list<int32_t> coords);
Point unit_vector(int axis, int sign = 1);

Point operator+(Point a, const Point& b);
Point operator-(Point a, const Point& b);

int64_t norm2(const Point& p);
double norm(const Point& p);
int64_t dist2(const Point& a, const Point& b);
int32_t max_abs_coord(const Point& p);

/// Sorted absolute coordinates: the representative of x under the
/// hyperoctahedral group, used as a symmetry key.
Point canonical(const Point& p);

/// The 2d nearest neighbours of p, in the order (+e1, -e1, +e2, -e2, ...).
std::array<Point, 2 * kMaxDim> neighbors(const Point& p, int d);

std::string to_string(const Point& p, int d);

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept;
};

/// Unordered nearest-neighbour pair stored with the lexicographically smaller
/// endpoint first.
class Edge {
 public:
  Edge(const Point& a, const Point& b);

  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;

 private:
  Point lo_;
  Point hi_;
};

struct EdgeHash {
  std::size_t operator()(const Edge& e) const noexcept;
};

/// Euclidean ball B_r(center) = { x : |x - center| <= r }.
struct Box {
  Point center{};
  int32_t radius = 0;

  bool contains(const Point& x) const {
    const int64_t r = radius;
    return dist2(x, center) <= r * r;
  }
};

/// Lattice points of the ball in lexicographic order.
std::vector<Point> ball_points(const Box& box, int d);
std::size_t ball_size(const Box& box, int d);

/// x in the ball with at least one neighbour outside of it.
bool on_ball_boundary(const Point& x, const Box& box);

/// Inner boundary of the ball, lexicographic order. Radius 0 gives {center}.
std::vector<Point> ball_boundary(const Box& box, int d);

double dist_sets(std::span<const Point> a, std::span<const Point> b);

/// Maximal Euclidean distance over pairs of the set (0 for fewer than two points).
double set_diameter(std::span<const Point> pts);

}  // namespace loopsoup

template <>
struct std::hash<loopsoup::Point> : loopsoup::PointHash {};
template <>
struct std::hash<loopsoup::Edge> : loopsoup::EdgeHash {};
