#include "loopsoup/percolation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace loopsoup {

namespace {

uint32_t find(std::vector<uint32_t>& parent, uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void require_ball_in_window(const Soup& soup, const Point& center, int n) {
  const Box& w = soup.window();
  if (n < 0 || norm(center - w.center) + n > w.radius + 1e-12) {
    throw InvalidArgument("window too small: B_" + std::to_string(n) + " does not fit in a window of radius " +
                          std::to_string(w.radius));
  }
}

bool interior(const Point& v, const Box& b) { return b.contains(v) && !on_ball_boundary(v, b); }

}  // namespace

ClusterPartition::ClusterPartition(std::span<const Edge> edges) {
  index_.reserve(2 * edges.size());
  auto slot = [&](const Point& p) {
    auto [it, fresh] = index_.try_emplace(p, static_cast<uint32_t>(points_.size()));
    if (fresh) points_.push_back(p);
    return it->second;
  };
  std::vector<uint32_t> parent, size;
  for (const auto& e : edges) {
    const uint32_t a = slot(e.lo()), b = slot(e.hi());
    while (parent.size() < points_.size()) {
      parent.push_back(static_cast<uint32_t>(parent.size()));
      size.push_back(1);
    }
    uint32_t ra = find(parent, a), rb = find(parent, b);
    if (ra == rb) continue;
    if (size[ra] < size[rb]) std::swap(ra, rb);
    parent[rb] = ra;
    size[ra] += size[rb];
  }
  // dense ids in order of first appearance
  comp_.assign(points_.size(), 0);
  std::vector<int64_t> dense(points_.size(), -1);
  for (uint32_t i = 0; i < points_.size(); ++i) {
    const uint32_t r = find(parent, i);
    if (dense[r] < 0) dense[r] = static_cast<int64_t>(components_++);
    comp_[i] = static_cast<uint32_t>(dense[r]);
  }
}

int64_t ClusterPartition::id(const Point& p) const {
  const auto it = index_.find(p);
  return it == index_.end() ? int64_t{-1} : static_cast<int64_t>(comp_[it->second]);
}

bool ClusterPartition::connected(const Point& a, const Point& b) const {
  if (a == b) return true;
  const int64_t ia = id(a);
  return ia >= 0 && ia == id(b);
}

std::vector<Point> ClusterPartition::component(const Point& p) const {
  const int64_t c = id(p);
  if (c < 0) return {p};
  std::vector<Point> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (comp_[i] == static_cast<uint32_t>(c)) out.push_back(points_[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ClusterPartition build_clusters(std::span<const Edge> edges) { return ClusterPartition(edges); }

OriginCluster origin_cluster(const Soup& soup) {
  const auto edges = soup.open_edges();
  const ClusterPartition part(edges);
  const Point origin{};
  OriginCluster out;
  out.vertices = part.component(origin);
  const int64_t c = part.id(origin);
  if (c >= 0) {
    for (std::size_t i = 0; i < soup.loops().size(); ++i) {
      if (part.id(soup.loops()[i].root) == c) out.loops.push_back(i);
    }
  }
  out.diameter = set_diameter(out.vertices);
  for (const auto& v : out.vertices) {
    if (!interior(v, soup.window())) {
      out.touched_window_boundary = true;
      break;
    }
  }
  return out;
}

bool reaches_sphere(std::span<const Point> cluster, int n) {
  const Box b{Point{}, n};
  return std::any_of(cluster.begin(), cluster.end(), [&](const Point& v) { return !interior(v, b); });
}

bool one_arm(const Soup& soup, int n) {
  const Point origin{};
  require_ball_in_window(soup, origin, n);
  return reaches_sphere(origin_cluster(soup).vertices, n);
}

bool two_point(const Soup& soup, const Point& x) {
  if (!soup.window().contains(x)) throw InvalidArgument("two_point: " + to_string(x, soup.dim()) + " outside the window");
  const auto edges = soup.open_edges();
  return ClusterPartition(edges).connected(Point{}, x);
}

namespace {

std::vector<Edge> kept_edges(const Soup& soup, const LoopPredicate& keep) {
  std::vector<Edge> edges;
  for (const auto& loop : soup.loops()) {
    if (keep && !keep(loop)) continue;
    const auto e = loop.edges();
    edges.insert(edges.end(), e.begin(), e.end());
  }
  return edges;
}

}  // namespace

bool filtered_connectivity(const Soup& soup, const LoopPredicate& keep, const Point& source, const Point& target) {
  if (!soup.window().contains(source) || !soup.window().contains(target)) {
    throw InvalidArgument("filtered_connectivity: endpoint outside the window");
  }
  const auto edges = kept_edges(soup, keep);
  return ClusterPartition(edges).connected(source, target);
}

bool filtered_one_arm(const Soup& soup, const LoopPredicate& keep, const Point& source, int n) {
  require_ball_in_window(soup, source, n);
  const auto edges = kept_edges(soup, keep);
  const auto comp = ClusterPartition(edges).component(source);
  const Box b{source, n};
  return std::any_of(comp.begin(), comp.end(), [&](const Point& v) { return !interior(v, b); });
}

LoopPredicate diameter_at_most(double m) {
  return [m](const Loop& loop) { return !loop.diameter_exceeds(m); };
}

LoopPredicate contained_in(const Box& box) {
  return [box](const Loop& loop) {
    return std::all_of(loop.trace.begin(), loop.trace.end(), [&](const Point& p) { return box.contains(p); });
  };
}

}  // namespace loopsoup
