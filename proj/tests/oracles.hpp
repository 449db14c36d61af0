#pragma once

// Brute-force reference implementations used as test oracles.

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "loopsoup/lattice.hpp"

namespace oracle {

using loopsoup::Edge;
using loopsoup::Point;

/// Every closed nearest-neighbour path of k steps from 0, as step sequences
/// (step s moves axis s/2 by +1 for even s, -1 for odd s).
inline std::vector<std::vector<int>> closed_paths(int d, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> steps(static_cast<std::size_t>(k), 0);
  Point pos{};
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      if (pos == Point{}) out.push_back(steps);
      return;
    }
    for (int s = 0; s < 2 * d; ++s) {
      const int sgn = (s & 1) ? -1 : 1;
      pos[s / 2] += sgn;
      // prune: must be able to return in the remaining steps
      int64_t l1 = 0;
      for (int i = 0; i < d; ++i) l1 += pos[i] < 0 ? -pos[i] : pos[i];
      if (l1 <= k - depth - 1) {
        steps[static_cast<std::size_t>(depth)] = s;
        self(self, depth + 1);
      }
      pos[s / 2] -= sgn;
    }
  };
  rec(rec, 0);
  return out;
}

/// Component label per vertex by breadth-first search over the edge set.
inline std::map<Point, int> bfs_components(const std::vector<Edge>& edges) {
  std::map<Point, std::vector<Point>> adj;
  for (const auto& e : edges) {
    adj[e.lo()].push_back(e.hi());
    adj[e.hi()].push_back(e.lo());
  }
  std::map<Point, int> label;
  int next = 0;
  for (const auto& [v, _] : adj) {
    if (label.count(v)) continue;
    std::queue<Point> q;
    q.push(v);
    label[v] = next;
    while (!q.empty()) {
      const Point u = q.front();
      q.pop();
      for (const auto& w : adj[u]) {
        if (label.emplace(w, next).second) q.push(w);
      }
    }
    ++next;
  }
  return label;
}

inline bool bfs_connected(const std::vector<Edge>& edges, const Point& a, const Point& b) {
  if (a == b) return true;
  const auto label = bfs_components(edges);
  const auto ia = label.find(a), ib = label.find(b);
  return ia != label.end() && ib != label.end() && ia->second == ib->second;
}

}  // namespace oracle
