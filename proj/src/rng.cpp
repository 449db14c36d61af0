#include "loopsoup/rng.hpp"

#include <random>

#include "loopsoup/lattice.hpp"

namespace loopsoup {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) {
  uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
}

Rng Rng::stream(uint64_t master_seed, std::initializer_list<uint64_t> keys) {
  uint64_t st = master_seed;
  uint64_t h = splitmix64(st);
  for (uint64_t k : keys) {
    st = h ^ (k * 0xd1b54a32d192ed03ULL);
    h = splitmix64(st);
  }
  return Rng(h);
}

Rng Rng::stream(uint64_t master_seed, uint64_t replica, const Point& vertex) {
  return stream(master_seed, {replica, static_cast<uint64_t>(PointHash{}(vertex))});
}

uint64_t Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<uint64_t> dist(mean);
  return dist(*this);
}

}  // namespace loopsoup
