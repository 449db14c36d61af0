#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "loopsoup/lattice.hpp"
#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

struct SoupParams {
  double alpha = 0.1;
  int dim = 3;
  Box window{};                        // region where connectivity must be exact
  const LengthTable* table = nullptr;
  uint64_t seed = 1;
  uint64_t replica = 0;
  /// Root loops in window (+) max_length/2. Switching this off roots loops in
  /// the window only, which is the truncated loop space of the Mecke checks.
  bool enlarge = true;
  double max_loops = 5e7;              // memory budget on the expected loop count
};

/// A multiset of loops together with the number of loops traversing each edge.
class Soup {
 public:
  Soup() = default;
  Soup(int dim, Box window, Box root_window) : dim_(dim), window_(window), root_window_(root_window) {}

  int dim() const { return dim_; }
  const Box& window() const { return window_; }
  const Box& root_window() const { return root_window_; }
  const std::vector<Loop>& loops() const { return loops_; }
  std::size_t size() const { return loops_.size(); }

  void add(Loop loop);
  /// Throws InvalidArgument for an index past the end.
  void remove(std::size_t index);

  bool is_open(const Edge& e) const { return edge_count_.count(e) != 0; }
  std::size_t open_edge_count() const { return edge_count_.size(); }
  /// Open edges, sorted.
  std::vector<Edge> open_edges() const;

 private:
  int dim_ = 0;
  Box window_{};
  Box root_window_{};
  std::vector<Loop> loops_;
  std::unordered_map<Edge, uint32_t, EdgeHash> edge_count_;
};

Box root_window(const SoupParams& params);

/// Poisson(alpha m_d) loops at every vertex of the root window, each with a
/// length from sample_length and a bridge from sample_bridge. Vertex x draws
/// from Rng::stream(seed, replica, x), so the result does not depend on the
/// thread count. Loops are stored in lexicographic root order.
Soup sample_soup(const SoupParams& params);
/// Single-threaded reference implementation of sample_soup.
Soup sample_soup_serial(const SoupParams& params);

std::vector<Edge> open_edges(const Soup& soup);
Soup add_loop(Soup soup, Loop loop);
Soup remove_loop(Soup soup, std::size_t index);

using LoopPredicate = std::function<bool(const Loop&)>;

/// Cluster of the origin in an infinite-volume truncated soup, grown loop by
/// loop without sampling anything outside of it.
struct ExploredCluster {
  std::vector<Point> vertices;  // sorted, always contains 0
  std::vector<Loop> loops;
  bool stopped = false;         // exploration ended early because stop() fired
};

struct ExploreParams {
  double alpha = 0.1;
  const LengthTable* table = nullptr;
  /// Called on each newly reached vertex; returning true ends the exploration.
  std::function<bool(const Point&)> stop;
  /// Loops failing the predicate are discarded (thinning), if set.
  LoopPredicate keep;
  std::size_t max_vertices = 1'000'000;
};

/// Exact sampler for the origin cluster. With explored set B and frontier A,
/// the loops meeting A but not B are a Poisson process independent of
/// everything revealed so far. They are generated by rooting Poisson(alpha
/// sum_k p_k) loops at each x in A with length law p_k, dropping loops that
/// meet B, and keeping the rest with probability 1 / #{j < k : w(j) in A},
/// which turns the visit-weighted proposal into alpha mu.
ExploredCluster explore_origin_cluster(const ExploreParams& params, Rng& rng);

}  // namespace loopsoup
