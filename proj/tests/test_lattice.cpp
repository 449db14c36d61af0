#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "loopsoup/lattice.hpp"

using namespace loopsoup;

namespace {

// all points of [-r, r]^d
std::vector<Point> cube(int d, int r) {
  std::vector<Point> out;
  Point p{};
  for (int i = 0; i < d; ++i) p[i] = -r;
  for (;;) {
    out.push_back(p);
    int i = 0;
    while (i < d && p[i] == r) p[i++] = -r;
    if (i == d) break;
    ++p[i];
  }
  return out;
}

}  // namespace

TEST_CASE("ball_boundary small cases") {
  const auto b2 = ball_boundary(Box{Point{}, 1}, 2);
  const std::vector<Point> want2{make_point({-1, 0}), make_point({0, -1}), make_point({0, 1}), make_point({1, 0})};
  CHECK(b2 == want2);
  CHECK(ball_boundary(Box{Point{}, 1}, 3).size() == 6);

  const Point c = make_point({2, -1, 5});
  const auto b0 = ball_boundary(Box{c, 0}, 3);
  REQUIRE(b0.size() == 1);
  CHECK(b0[0] == c);
}

TEST_CASE("ball_boundary d=5 r=4 against a definition scan") {
  const int d = 5;
  const Box box{Point{}, 4};
  std::vector<Point> want;
  for (const auto& x : cube(d, 4)) {
    if (norm2(x) > 16) continue;
    bool outside = false;
    for (int i = 0; i < d && !outside; ++i) {
      for (int s : {-1, 1}) {
        Point y = x;
        y[i] += s;
        if (norm2(y) > 16) outside = true;
      }
    }
    if (outside) want.push_back(x);
  }
  std::sort(want.begin(), want.end());
  const auto got = ball_boundary(box, d);
  CHECK(got == want);
  for (const auto& x : got) {
    CHECK(norm2(x) > 9);
    CHECK(norm2(x) <= 16);
  }
}

TEST_CASE("ball_points and ball_size agree with a scan") {
  for (int d : {2, 3, 4}) {
    for (int r : {0, 1, 3, 5}) {
      const Box box{make_point({1, -2}), r};
      std::size_t count = 0;
      for (const auto& x : cube(d, r + 3)) count += box.contains(x);
      CHECK(ball_points(box, d).size() == count);
      CHECK(ball_size(box, d) == count);
    }
  }
}

TEST_CASE("dist_sets") {
  const std::vector<Point> zero{Point{}};
  CHECK(dist_sets(zero, zero) == 0.0);
  const std::vector<Point> b{make_point({3, 4, 0})};
  CHECK(dist_sets(zero, b) == doctest::Approx(5.0).epsilon(1e-15));

  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> A(10), B(10);
    for (auto* s : {&A, &B}) {
      for (auto& p : *s) p = make_point({u(gen), u(gen), u(gen)});
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : A) {
      for (const auto& c : B) {
        const double dx = a[0] - c[0], dy = a[1] - c[1], dz = a[2] - c[2];
        best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
      }
    }
    CHECK(dist_sets(A, B) == doctest::Approx(best).epsilon(1e-14));
  }

  const std::vector<Point> empty;
  CHECK_THROWS_WITH_AS(dist_sets(empty, zero), doctest::Contains("empty set"), InvalidArgument);
}

TEST_CASE("edges are canonical") {
  const Point a = make_point({0, 0, 0}), b = make_point({0, 1, 0});
  const Edge e1(a, b), e2(b, a);
  CHECK(e1 == e2);
  CHECK(e1.lo() == a);
  CHECK(EdgeHash{}(e1) == EdgeHash{}(e2));
  CHECK_THROWS_AS(Edge(a, make_point({1, 1, 0})), InvalidArgument);
  CHECK_THROWS_AS(Edge(a, a), InvalidArgument);
}

TEST_CASE("canonical form and neighbours") {
  CHECK(canonical(make_point({-3, 1, 2})) == make_point({3, 2, 1}));
  const auto nb = neighbors(Point{}, 3);
  CHECK(nb[0] == unit_vector(0));
  CHECK(nb[1] == unit_vector(0, -1));
  CHECK(nb[5] == unit_vector(2, -1));
  CHECK(set_diameter(std::vector<Point>{Point{}, make_point({1, 1})}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(set_diameter(std::vector<Point>{Point{}}) == 0.0);
}
