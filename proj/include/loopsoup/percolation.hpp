#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "loopsoup/lattice.hpp"
#include "loopsoup/soup.hpp"

namespace loopsoup {

/// Union-find over the endpoints of a set of open edges, with dense
/// component ids 0..components()-1. Vertices without open edges have no id.
class ClusterPartition {
 public:
  explicit ClusterPartition(std::span<const Edge> edges);

  std::size_t vertices() const { return points_.size(); }
  std::size_t components() const { return components_; }
  /// Component id, or -1 for a vertex with no open edge.
  int64_t id(const Point& p) const;
  bool connected(const Point& a, const Point& b) const;
  /// Vertex set of the component of p, sorted; {p} if p is isolated.
  std::vector<Point> component(const Point& p) const;

 private:
  std::unordered_map<Point, uint32_t, PointHash> index_;
  std::vector<Point> points_;
  std::vector<uint32_t> comp_;
  std::size_t components_ = 0;
};

ClusterPartition build_clusters(std::span<const Edge> edges);

struct OriginCluster {
  std::vector<Point> vertices;       // C_0 together with 0, sorted
  std::vector<std::size_t> loops;    // indices of loops meeting C_0
  double diameter = 0.0;
  bool touched_window_boundary = false;
};

OriginCluster origin_cluster(const Soup& soup);

/// 0 <-> dB_n. Throws InvalidArgument("window too small") unless B_n lies
/// in the soup window.
bool one_arm(const Soup& soup, int n);
/// 0 <-> x. Throws InvalidArgument if x is outside the window.
bool two_point(const Soup& soup, const Point& x);

/// Connectivity using only loops that satisfy keep.
bool filtered_connectivity(const Soup& soup, const LoopPredicate& keep, const Point& source,
                           const Point& target);
/// source <-> dB_n using only loops that satisfy keep.
bool filtered_one_arm(const Soup& soup, const LoopPredicate& keep, const Point& source, int n);

/// Vertices of the cluster reach dB_n, i.e. some vertex is not interior to B_n.
bool reaches_sphere(std::span<const Point> cluster, int n);

/// Predicates on loops.
LoopPredicate diameter_at_most(double m);
LoopPredicate contained_in(const Box& box);

}  // namespace loopsoup
