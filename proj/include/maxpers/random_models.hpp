#pragma once

#include <cstdint>
#include <random>

#include "maxpers/model.hpp"

namespace maxpers {

enum class Family { potts, full };

// Rejection-sampled uniform integer in [lo, hi]; bitwise reproducible across
// platforms (mt19937_64 output is fully specified by the standard).
int64_t uniform_int(std::mt19937_64& rng, int64_t lo, int64_t hi);

// 4-connected rows x cols grid with uniform integer costs in [lo, hi].
// Family potts draws one coupling per edge, f_uv(i,j) = lambda * [i != j];
// family full draws the whole pairwise table. Node order is row-major;
// edges are emitted right-then-down per cell.
GraphicalModel gen_random(Family family, int rows, int cols, int labels,
                          int64_t lo, int64_t hi, uint64_t seed);

}  // namespace maxpers
