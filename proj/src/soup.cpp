#include "loopsoup/soup.hpp"

#include <omp.h>

#include <algorithm>
#include <string>

namespace loopsoup {

namespace {

constexpr std::size_t kVertexChunk = 512;

void check_params(const SoupParams& p) {
  require_dim(p.dim, 3);
  if (p.table == nullptr) throw InvalidArgument("sample_soup: no length table");
  if (p.table->dim != p.dim) throw InvalidArgument("sample_soup: table dimension does not match");
  if (!(p.alpha >= 0.0)) throw InvalidArgument("sample_soup: alpha must be >= 0");
  if (p.window.radius < 0) throw InvalidArgument("sample_soup: negative window radius");
}

void sample_vertex(const SoupParams& p, const Point& x, double mean, std::vector<Loop>& out) {
  Rng rng = Rng::stream(p.seed, p.replica, x);
  const uint64_t n = rng.poisson(mean);
  for (uint64_t i = 0; i < n; ++i) {
    const int k = sample_length(*p.table, rng);
    out.push_back(sample_bridge(x, k, *p.table, rng));
  }
}

struct Prepared {
  Box root;
  std::vector<Point> roots;
  double mean;
};

Prepared prepare(const SoupParams& p) {
  check_params(p);
  Prepared r;
  r.root = root_window(p);
  r.mean = p.alpha * p.table->per_vertex_mass;
  const double expected = r.mean * static_cast<double>(ball_size(r.root, p.dim));
  if (expected > p.max_loops) {
    throw InvalidArgument("sample_soup: expected " + std::to_string(expected) + " loops exceeds the budget of " +
                          std::to_string(p.max_loops) + "; shrink the window or max_length");
  }
  r.roots = ball_points(r.root, p.dim);
  return r;
}

}  // namespace

void Soup::add(Loop loop) {
  for (const auto& e : loop.edges()) ++edge_count_[e];
  loops_.push_back(std::move(loop));
}

void Soup::remove(std::size_t index) {
  if (index >= loops_.size()) {
    throw InvalidArgument("remove_loop: index " + std::to_string(index) + " out of range (" +
                          std::to_string(loops_.size()) + " loops)");
  }
  for (const auto& e : loops_[index].edges()) {
    auto it = edge_count_.find(e);
    if (--it->second == 0) edge_count_.erase(it);
  }
  loops_.erase(loops_.begin() + static_cast<std::ptrdiff_t>(index));
}

std::vector<Edge> Soup::open_edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_.size());
  for (const auto& [e, n] : edge_count_) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

Box root_window(const SoupParams& params) {
  Box b = params.window;
  // a loop of length <= L stays within L/2 of its root
  if (params.enlarge) b.radius += params.table->max_length / 2;
  return b;
}

Soup sample_soup(const SoupParams& params) {
  const Prepared prep = prepare(params);
  const std::size_t nv = prep.roots.size();
  const std::size_t chunks = (nv + kVertexChunk - 1) / kVertexChunk;
  std::vector<std::vector<Loop>> parts(chunks);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kVertexChunk;
    const std::size_t hi = std::min(nv, lo + kVertexChunk);
    for (std::size_t i = lo; i < hi; ++i) sample_vertex(params, prep.roots[i], prep.mean, parts[static_cast<std::size_t>(c)]);
  }
  Soup soup(params.dim, params.window, prep.root);
  for (auto& part : parts) {
    for (auto& loop : part) soup.add(std::move(loop));
  }
  return soup;
}

Soup sample_soup_serial(const SoupParams& params) {
  const Prepared prep = prepare(params);
  Soup soup(params.dim, params.window, prep.root);
  std::vector<Loop> buf;
  for (const auto& x : prep.roots) {
    buf.clear();
    sample_vertex(params, x, prep.mean, buf);
    for (auto& loop : buf) soup.add(std::move(loop));
  }
  return soup;
}

std::vector<Edge> open_edges(const Soup& soup) { return soup.open_edges(); }

Soup add_loop(Soup soup, Loop loop) {
  soup.add(std::move(loop));
  return soup;
}

Soup remove_loop(Soup soup, std::size_t index) {
  soup.remove(index);
  return soup;
}

}  // namespace loopsoup
