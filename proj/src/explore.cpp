#include <algorithm>
#include <string>
#include <unordered_map>

#include "loopsoup/soup.hpp"

namespace loopsoup {

namespace {

enum : uint8_t { kExplored = 1, kFrontier = 2, kNext = 3 };

}  // namespace

ExploredCluster explore_origin_cluster(const ExploreParams& params, Rng& rng) {
  if (params.table == nullptr) throw InvalidArgument("explore_origin_cluster: no length table");
  if (!(params.alpha >= 0.0)) throw InvalidArgument("explore_origin_cluster: alpha must be >= 0");
  const LengthTable& table = *params.table;
  const double mean = params.alpha * table.return_mass;

  ExploredCluster out;
  std::unordered_map<Point, uint8_t, PointHash> state;
  const Point origin{};
  state[origin] = kFrontier;
  std::vector<Point> frontier{origin}, next;
  out.vertices.push_back(origin);
  if (params.stop && params.stop(origin)) {
    out.stopped = true;
    return out;
  }

  while (!frontier.empty()) {
    next.clear();
    for (const auto& x : frontier) {
      const uint64_t n = rng.poisson(mean);
      for (uint64_t i = 0; i < n; ++i) {
        Loop loop = sample_bridge(x, sample_return_length(table, rng), table, rng);
        bool meets_explored = false;
        uint64_t frontier_visits = 0;
        for (int j = 0; j < loop.length; ++j) {
          const auto it = state.find(loop.trace[static_cast<std::size_t>(j)]);
          if (it == state.end()) continue;
          if (it->second == kExplored) {
            meets_explored = true;
            break;
          }
          if (it->second == kFrontier) ++frontier_visits;
        }
        if (meets_explored) continue;
        if (frontier_visits > 1 && rng.below(frontier_visits) != 0) continue;
        if (params.keep && !params.keep(loop)) continue;

        for (const auto& p : loop.trace) {
          auto [it, fresh] = state.try_emplace(p, kNext);
          if (!fresh) continue;
          next.push_back(p);
          out.vertices.push_back(p);
          if (params.stop && params.stop(p)) out.stopped = true;
        }
        out.loops.push_back(std::move(loop));
        if (out.stopped) break;
        if (out.vertices.size() > params.max_vertices) {
          throw NumericalError("explore_origin_cluster: cluster exceeds " + std::to_string(params.max_vertices) +
                               " vertices; alpha is too large for this sampler");
        }
      }
      if (out.stopped) break;
    }
    if (out.stopped) break;
    for (const auto& x : frontier) state[x] = kExplored;
    for (const auto& x : next) state[x] = kFrontier;
    frontier.swap(next);
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  return out;
}

}  // namespace loopsoup
