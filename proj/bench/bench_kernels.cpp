// Serial reference vs OpenMP kernels: length-table convolutions and soup sampling.
// Usage: bench_kernels [repeats]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <utility>

#include "loopsoup/loopmeasure.hpp"
#include "loopsoup/soup.hpp"

using namespace loopsoup;

namespace {

double best_of(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* kernel, double serial, double parallel, bool same) {
  std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", kernel, serial, parallel, serial / parallel,
              same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads %d, best of %d\n", omp_get_max_threads(), repeats);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "openmp s", "speedup");

  for (const auto& [d, L] : {std::pair{3, 10000}, std::pair{5, 10000}}) {
    LengthTable a, b;
    const double ts = best_of(repeats, [&] { a = build_length_table(d, L, 1e-4, Exec::kSerial); });
    const double tp = best_of(repeats, [&] { b = build_length_table(d, L, 1e-4, Exec::kParallel); });
    const std::string name = "length table d=" + std::to_string(d) + " L=" + std::to_string(L);
    row(name.c_str(), ts, tp, a.return_prob == b.return_prob);
  }

  const auto table = build_length_table(3, 100);
  SoupParams p;
  p.alpha = 0.5;
  p.dim = 3;
  p.window = Box{Point{}, 24};
  p.table = &table;
  p.seed = 1;
  Soup s1, s2;
  const double ts = best_of(repeats, [&] { s1 = sample_soup_serial(p); });
  const double tp = best_of(repeats, [&] { s2 = sample_soup(p); });
  bool same = s1.size() == s2.size();
  for (std::size_t i = 0; same && i < s1.size(); ++i) same = s1.loops()[i].trace == s2.loops()[i].trace;
  row("soup d=3 window 24 L=100", ts, tp, same);
  return 0;
}
