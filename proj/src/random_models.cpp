#include "maxpers/random_models.hpp"

namespace maxpers {

int64_t uniform_int(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  require(lo <= hi, "empty cost range");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(rng());  // full 64-bit range
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % span);
}

GraphicalModel gen_random(Family family, int rows, int cols, int labels,
                          int64_t lo, int64_t hi, uint64_t seed) {
  require(rows >= 1 && cols >= 1, "grid must be at least 1x1");
  require(labels >= 2, "need at least 2 labels");
  std::mt19937_64 rng(seed);
  GraphicalModel f(std::vector<int>(static_cast<size_t>(rows) * cols, labels));
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < labels; ++i)
      f.unary_table(v)[i] = static_cast<double>(uniform_int(rng, lo, hi));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      int id = r * cols + c;
      if (c + 1 < cols) f.add_edge(id, id + 1);
      if (r + 1 < rows) f.add_edge(id, id + cols);
    }
  for (int e = 0; e < f.num_edges(); ++e) {
    if (family == Family::potts) {
      double lambda = static_cast<double>(uniform_int(rng, lo, hi));
      for (int i = 0; i < labels; ++i)
        for (int j = 0; j < labels; ++j)
          f.set_pairwise(e, i, j, i == j ? 0.0 : lambda);
    } else {
      for (int i = 0; i < labels; ++i)
        for (int j = 0; j < labels; ++j)
          f.set_pairwise(e, i, j, static_cast<double>(uniform_int(rng, lo, hi)));
    }
  }
  f.set_integer_costs(true);
  return f;
}

}  // namespace maxpers
