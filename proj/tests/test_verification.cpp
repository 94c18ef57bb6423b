#include <cmath>

#include "doctest.h"
#include "maxpers/verification.hpp"
#include "test_support.hpp"

using namespace maxpers;

namespace {

// 1 edge, two binary nodes, the worked reduction fixture used across suites.
GraphicalModel worked_model() {
  GraphicalModel f({2, 2});
  f.add_edge(0, 1);
  f.set_pairwise(0, 0, 0, 0);
  f.set_pairwise(0, 0, 1, 4);
  f.set_pairwise(0, 1, 0, 3);
  f.set_pairwise(0, 1, 1, 10);
  f.set_integer_costs(true);
  return f;
}

bool submodular_truncation_holds(const GraphicalModel& bar, const SubsetToOne& p) {
  for (int e = 0; e < bar.num_edges(); ++e) {
    int u = bar.edge(e).u, v = bar.edge(e).v;
    for (int i = 0; i < bar.num_labels(u); ++i)
      for (int j = 0; j < bar.num_labels(v); ++j)
        for (int i2 = 0; i2 < bar.num_labels(u); ++i2)
          for (int j2 = 0; j2 < bar.num_labels(v); ++j2) {
            if (!p.in_Y(u, i) || !p.in_Y(v, j)) continue;
            if (p.in_Y(u, i2) || p.in_Y(v, j2)) continue;
            double mixed = bar.pairwise(e, i, j2) + bar.pairwise(e, i2, j) -
                           bar.pairwise(e, i, j) - bar.pairwise(e, i2, j2);
            if (mixed < 0.0) return false;
          }
  }
  return true;
}

}  // namespace

TEST_CASE("verification_costs: identity substitution gives zero") {
  GraphicalModel f = gen_random(Family::full, 2, 2, 3, -5, 5, 21);
  SubsetToOne id(f.labels(), Labeling(f.num_nodes(), 0));
  GraphicalModel g = verification_costs(f, id);
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int i = 0; i < g.num_labels(v); ++i) CHECK(g.unary(v, i) == 0.0);
  for (int e = 0; e < g.num_edges(); ++e)
    for (double c : g.pairwise_table(e)) CHECK(c == 0.0);
}

TEST_CASE("verification_costs: zero block on immovable pairs; energy identity") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 60; ++t) {
    GraphicalModel f = gen_random(Family::full, 2, 3, 3, -9, 9, 700 + t);
    Labeling y = testing::random_labeling(f, rng);
    SubsetToOne p = testing::random_substitution(f, y, rng);
    GraphicalModel g = verification_costs(f, p);
    CHECK(g.constant() == 0.0);
    for (int e = 0; e < g.num_edges(); ++e) {
      int u = g.edge(e).u, v = g.edge(e).v;
      for (int i = 0; i < g.num_labels(u); ++i)
        for (int j = 0; j < g.num_labels(v); ++j)
          if (!p.in_Y(u, i) && !p.in_Y(v, j)) CHECK(g.pairwise(e, i, j) == 0.0);
    }
    Labeling x = testing::random_labeling(f, rng);
    CHECK(energy(g, x) == energy(f, x) - energy(f, apply(p, x)));
  }
}

TEST_CASE("reduce: empty Y leaves everything zero") {
  GraphicalModel f = gen_random(Family::full, 2, 2, 3, -5, 5, 77);
  SubsetToOne id(f.labels(), Labeling(f.num_nodes(), 1));
  ReducedCosts r = reduce(f, id);
  for (int e = 0; e < f.num_edges(); ++e)
    for (double c : r.base().pairwise_table(e)) CHECK(c == 0.0);
  for (int v = 0; v < f.num_nodes(); ++v)
    for (double c : r.base().unary_table(v)) CHECK(c == 0.0);
}

TEST_CASE("reduce: worked two-node example") {
  GraphicalModel f = worked_model();
  SubsetToOne p = SubsetToOne::full(f, {0, 0});  // Y_u = {1}, Y_v = {1}
  ReducedCosts r = reduce(f, p);
  CHECK(r.delta_u(0)[1] == 3.0);
  CHECK(r.delta_v(0)[1] == 4.0);
  CHECK(r.base().pairwise(0, 1, 1) == 7.0);
  CHECK(r.base().pairwise(0, 1, 0) == 3.0);
  CHECK(r.base().pairwise(0, 0, 1) == 4.0);
  CHECK(r.base().pairwise(0, 0, 0) == 0.0);
  CHECK(energy(r.base(), {0, 0}) == 0.0);
  CHECK(r.base().constant() == 0.0);

  // the g-based path computes the same vector
  GraphicalModel via_g = reduce_from_verification(verification_costs(f, p), p);
  for (int e = 0; e < f.num_edges(); ++e)
    CHECK(via_g.pairwise_table(e) == r.base().pairwise_table(e));
}

TEST_CASE("reduce: invariants on random instances") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 200; ++t) {
    GraphicalModel f = (t % 2) ? gen_random(Family::full, 2, 2, 3, -10, 10, t)
                               : gen_random(Family::potts, 2, 3, 3, -10, 10, t);
    Labeling y = testing::random_labeling(f, rng);
    SubsetToOne p = testing::random_substitution(f, y, rng);
    ReducedCosts r = reduce(f, p);
    const GraphicalModel& bar = r.base();
    GraphicalModel g = verification_costs(f, p);

    // unary rows of the reduction table
    for (int v = 0; v < f.num_nodes(); ++v)
      for (int i = 0; i < f.num_labels(v); ++i) {
        if (p.in_Y(v, i))
          CHECK(bar.unary(v, i) == f.unary(v, i) - f.unary(v, y[v]));
        else
          CHECK(bar.unary(v, i) == 0.0);
        CHECK(bar.unary(v, i) == g.unary(v, i));
      }
    // bar g <= g on pairwise tables, zero on immovable pairs
    for (int e = 0; e < f.num_edges(); ++e) {
      int u = f.edge(e).u, v = f.edge(e).v;
      for (int i = 0; i < f.num_labels(u); ++i)
        for (int j = 0; j < f.num_labels(v); ++j) {
          CHECK(bar.pairwise(e, i, j) <= g.pairwise(e, i, j));
          if (!p.in_Y(u, i) && !p.in_Y(v, j)) CHECK(bar.pairwise(e, i, j) == 0.0);
        }
    }
    CHECK(submodular_truncation_holds(bar, p));
    CHECK(energy(bar, y) == 0.0);

    // direct-from-f path agrees with the g-based cross-check exactly
    GraphicalModel via_g = reduce_from_verification(g, p);
    for (int e = 0; e < f.num_edges(); ++e)
      CHECK(via_g.pairwise_table(e) == bar.pairwise_table(e));
  }
}

TEST_CASE("contract: label bookkeeping") {
  GraphicalModel f({5});
  f.unary_table(0) = {0, 1, 2, 3, 4};
  SubsetToOne p(f.labels(), {2});
  p.add(0, 4);
  Contraction c = contract(reduce(f, p));
  CHECK(c.model.num_labels(0) == 2);
  CHECK(c.to_original[0] == std::vector<int>{2, 4});
  CHECK(c.uncontract({1}) == Labeling{4});
  CHECK(c.uncontract({0}) == Labeling{2});

  GraphicalModel g({3, 3});
  g.add_edge(0, 1);
  SubsetToOne full = SubsetToOne::full(g, {0, 1});
  Contraction cf = contract(reduce(g, full));
  CHECK(cf.model.num_labels(0) == 3);  // identity up to relabeling
  CHECK(cf.model.num_labels(1) == 3);
}

TEST_CASE("contract: minimum preserved on random instances") {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 40; ++t) {
    GraphicalModel f = gen_random(Family::full, 2, 3, 3, -10, 10, 80 + t);
    Labeling y = testing::random_labeling(f, rng);
    SubsetToOne p = testing::random_substitution(f, y, rng);
    ReducedCosts r = reduce(f, p);
    Contraction c = contract(r);
    double min_bar = brute_force_min(r.base()).first;
    double min_con = brute_force_min(c.model).first;
    CHECK(min_bar == min_con);
    // contracted labelings evaluate identically after expansion
    for (int k = 0; k < 5; ++k) {
      Labeling xc = testing::random_labeling(c.model, rng);
      CHECK(energy(c.model, xc) == energy(r.base(), c.uncontract(xc)));
    }
  }
}
