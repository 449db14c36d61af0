#pragma once

#include <cstdint>

#include "loopsoup/lattice.hpp"
#include "loopsoup/rng.hpp"

namespace loopsoup {

/// Runs simple random walk from pos until hit(pos, r2) is true or the walk
/// leaves the kill ball |pos - center|^2 <= kill_r2. r2 is maintained
/// incrementally as |pos - center|^2. Returns true on a hit; pos holds the
/// final position either way.
template <class Hit>
bool walk_until(Point& pos, int d, const Point& center, int64_t kill_r2, Rng& rng, Hit&& hit) {
  int64_t r2 = dist2(pos, center);
  const auto dirs = static_cast<uint64_t>(2 * d);
  for (;;) {
    const uint64_t dir = rng.below(dirs);
    const int axis = static_cast<int>(dir >> 1);
    // arithmetic sign: a branch here is mispredicted half of the time
    const int32_t sgn = 1 - 2 * static_cast<int32_t>(dir & 1);
    const int64_t rel = static_cast<int64_t>(pos[axis]) - center[axis];
    r2 += 2 * sgn * rel + 1;
    pos[axis] += sgn;
    if (hit(pos, r2)) return true;
    if (r2 > kill_r2) return false;
  }
}

}  // namespace loopsoup
