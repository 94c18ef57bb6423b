#pragma once

#include <random>
#include <vector>

#include "maxpers/model.hpp"
#include "maxpers/random_models.hpp"
#include "maxpers/substitution.hpp"

namespace maxpers::testing {

// Random structures beyond grids, used across suites. Integer costs keep
// every oracle comparison exact.

inline void fill_random_tables(GraphicalModel& f, std::mt19937_64& rng, int64_t lo,
                               int64_t hi, bool potts) {
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i)
      f.unary_table(v)[i] = static_cast<double>(uniform_int(rng, lo, hi));
  for (int e = 0; e < f.num_edges(); ++e) {
    int ku = f.num_labels(f.edge(e).u), kv = f.num_labels(f.edge(e).v);
    if (potts) {
      double lambda = static_cast<double>(uniform_int(rng, lo, hi));
      for (int i = 0; i < ku; ++i)
        for (int j = 0; j < kv; ++j) f.set_pairwise(e, i, j, i == j ? 0.0 : lambda);
    } else {
      for (int i = 0; i < ku; ++i)
        for (int j = 0; j < kv; ++j)
          f.set_pairwise(e, i, j, static_cast<double>(uniform_int(rng, lo, hi)));
    }
  }
  f.set_integer_costs(true);
}

inline GraphicalModel random_chain(int n, int labels, int64_t lo, int64_t hi,
                                   uint64_t seed, bool potts = false) {
  std::mt19937_64 rng(seed);
  GraphicalModel f(std::vector<int>(n, labels));
  for (int v = 0; v + 1 < n; ++v) f.add_edge(v, v + 1);
  fill_random_tables(f, rng, lo, hi, potts);
  return f;
}

inline GraphicalModel random_cycle(int n, int labels, int64_t lo, int64_t hi,
                                   uint64_t seed, bool potts = false) {
  std::mt19937_64 rng(seed);
  GraphicalModel f(std::vector<int>(n, labels));
  for (int v = 0; v + 1 < n; ++v) f.add_edge(v, v + 1);
  if (n >= 3) f.add_edge(0, n - 1);
  fill_random_tables(f, rng, lo, hi, potts);
  return f;
}

// Uniformly random subset-to-one substitution for a given y: each movable
// label joins Y with probability num/den.
inline SubsetToOne random_substitution(const GraphicalModel& f, const Labeling& y,
                                       std::mt19937_64& rng, int num = 1, int den = 2) {
  SubsetToOne p(f.labels(), y);
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i)
      if (i != y[v] && uniform_int(rng, 0, den - 1) < num) p.add(v, i);
  return p;
}

inline Labeling random_labeling(const GraphicalModel& f, std::mt19937_64& rng) {
  Labeling x(f.num_nodes());
  for (int v = 0; v < f.num_nodes(); ++v)
    x[v] = static_cast<int>(uniform_int(rng, 0, f.num_labels(v) - 1));
  return x;
}

inline Reparametrization random_phi(const GraphicalModel& f, std::mt19937_64& rng,
                                    int64_t lo = -5, int64_t hi = 5) {
  Reparametrization phi(f);
  for (int e = 0; e < f.num_edges(); ++e) {
    for (double& m : phi.at_u(e)) m = static_cast<double>(uniform_int(rng, lo, hi));
    for (double& m : phi.at_v(e)) m = static_cast<double>(uniform_int(rng, lo, hi));
  }
  for (int v = 0; v < f.num_nodes(); ++v)
    phi.node_offset(v) = static_cast<double>(uniform_int(rng, lo, hi));
  return phi;
}

}  // namespace maxpers::testing
