#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "maxpers/lp.hpp"
#include "maxpers/verification.hpp"
#include "test_support.hpp"

using namespace maxpers;

namespace {

// Anti-Potts triangle: every labeling pays for at least one agreeing edge,
// the relaxation pays nothing (classic non-tight instance).
GraphicalModel frustrated_cycle() {
  GraphicalModel f({2, 2, 2});
  for (auto [u, v] : {std::pair{0, 1}, {1, 2}, {0, 2}}) {
    int e = f.add_edge(u, v);
    f.set_pairwise(e, 0, 0, 1.0);
    f.set_pairwise(e, 1, 1, 1.0);
  }
  f.set_integer_costs(true);
  return f;
}

GraphicalModel dominant_unary_model() {
  GraphicalModel f({3, 3});
  f.unary_table(0) = {0, 5, 9};
  f.unary_table(1) = {7, 0, 6};
  f.add_edge(0, 1);
  f.set_integer_costs(true);
  return f;
}

}  // namespace

TEST_CASE("solve_lp: zero costs give zero") {
  GraphicalModel g({2, 3});
  g.add_edge(0, 1);
  CHECK(solve_lp(g).value == doctest::Approx(0.0));
}

TEST_CASE("solve_lp: LP-tight chains match enumeration") {
  for (int t = 0; t < 15; ++t) {
    GraphicalModel f = testing::random_chain(4, 3, -9, 9, 210 + t);
    double exact = brute_force_min(f).first;
    LpSolution sol = solve_lp(f);
    CHECK(sol.value == doctest::Approx(exact).epsilon(1e-7));
    // the returned point is feasible and attains the value
    CHECK(dot(f, sol.point) == doctest::Approx(sol.value));
  }
}

TEST_CASE("solve_lp: frustrated cycle is loose") {
  GraphicalModel f = frustrated_cycle();
  double integer_min = brute_force_min(f).first;
  CHECK(integer_min == 1.0);
  LpSolution sol = solve_lp(f);
  CHECK(sol.value < integer_min - 0.4);
  CHECK(sol.value <= 1e-9);
}

TEST_CASE("solve_lp: relaxation never exceeds the integer minimum") {
  for (int t = 0; t < 20; ++t) {
    GraphicalModel f = (t % 2) ? testing::random_cycle(4, 3, -8, 8, 300 + t)
                               : gen_random(Family::full, 2, 2, 3, -8, 8, 300 + t);
    CHECK(solve_lp(f).value <= brute_force_min(f).first + 1e-7);
  }
}

TEST_CASE("solve_lp: size limits enforced") {
  GraphicalModel f(std::vector<int>(13, 2));
  CHECK_THROWS_AS(solve_lp(f), SizeLimitError);
  GraphicalModel g({6});
  CHECK_THROWS_AS(solve_lp(g), SizeLimitError);
}

TEST_CASE("support_sets: whole polytope optimal when costs vanish") {
  GraphicalModel g({2, 3});
  g.add_edge(0, 1);
  SupportSets s = support_sets(g);
  CHECK(s.sets[0] == std::vector<int>{0, 1});
  CHECK(s.sets[1] == std::vector<int>{0, 1, 2});
}

TEST_CASE("support_sets: dominant unaries give singletons") {
  SupportSets s = support_sets(dominant_unary_model());
  CHECK(s.sets[0] == std::vector<int>{0});
  CHECK(s.sets[1] == std::vector<int>{1});
}

TEST_CASE("support_sets: a tie in one node doubles that support") {
  GraphicalModel f({2, 2});
  f.unary_table(0) = {0, 0};  // degenerate pair of optima differing at node 0
  f.unary_table(1) = {0, 4};
  f.add_edge(0, 1);
  SupportSets s = support_sets(f);
  CHECK(s.sets[0] == std::vector<int>{0, 1});
  CHECK(s.sets[1] == std::vector<int>{0});
}

TEST_CASE("support_sets: independent of variable order") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    GraphicalModel f = gen_random(Family::full, 2, 2, 3, -6, 6, 400 + t);
    Labeling y = testing::random_labeling(f, rng);
    SubsetToOne p = testing::random_substitution(f, y, rng);
    GraphicalModel g = verification_costs(f, p);
    SupportSets base = support_sets(g);
    LocalPolytopeLP lp(g);
    std::vector<int> order(lp.num_vars());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    SupportSets shuffled = support_sets(g, {}, &order);
    CHECK(base.sets == shuffled.sets);
  }
}

TEST_CASE("is_strictly_improving_brute: identity, DEE move, displaced optimum") {
  GraphicalModel f({2, 2});
  f.unary_table(0) = {0, 10};
  f.unary_table(1) = {0, 0};
  f.add_edge(0, 1);
  f.set_pairwise(0, 1, 0, 5);
  f.set_pairwise(0, 1, 1, 5);
  f.set_integer_costs(true);

  SubsetToOne id(f.labels(), {0, 0});
  CHECK(is_strictly_improving_brute(f, id).improving);  // vacuous

  // dominated label 1 at node 0 moves to its dominator
  SubsetToOne dee(f.labels(), {0, 0});
  dee.add(0, 1);
  CHECK(is_strictly_improving_brute(f, dee).improving);

  // displacing the unique optimum must fail with a witness
  GraphicalModel h({2});
  h.unary_table(0) = {0, 3};
  SubsetToOne bad(h.labels(), {1});
  bad.add(0, 0);
  BruteImproving r = is_strictly_improving_brute(h, bad);
  CHECK_FALSE(r.improving);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness == Labeling{0});
}

TEST_CASE("is_relaxed_improving_exact: basic cases and the exact-implies-brute direction") {
  GraphicalModel f = dominant_unary_model();
  SubsetToOne id(f.labels(), {0, 1});
  CHECK(is_relaxed_improving_exact(f, id));

  SubsetToOne all = SubsetToOne::full(f, {0, 1});
  GraphicalModel zero_pairwise = f;  // pairwise already zero
  CHECK(is_relaxed_improving_exact(zero_pairwise, all));

  std::mt19937_64 rng(18);
  int members = 0;
  for (int t = 0; t < 40; ++t) {
    GraphicalModel g = gen_random(Family::full, 2, 2, 2, -6, 6, 500 + t);
    Labeling y = testing::random_labeling(g, rng);
    SubsetToOne p = testing::random_substitution(g, y, rng);
    if (is_relaxed_improving_exact(g, p)) {
      ++members;
      CHECK(is_strictly_improving_brute(g, p).improving);
    }
  }
  CHECK(members > 0);  // the property must actually fire
}

TEST_CASE("algorithm1: dominant unaries eliminate everything in one step") {
  GraphicalModel f = dominant_unary_model();
  Algorithm1Result res = algorithm1(f, {0, 1});
  CHECK(measures(res.p).label_fraction == 1.0);
  CHECK(res.iterations == 1);
}

TEST_CASE("algorithm1: zero costs return the identity") {
  GraphicalModel f({3, 3});
  f.add_edge(0, 1);
  Algorithm1Result res = algorithm1(f, {0, 0});
  CHECK(res.p.total_eliminated() == 0);
}

TEST_CASE("algorithm1: output is relaxed-improving, Y shrinks monotonically") {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 10; ++t) {
    GraphicalModel f = gen_random(Family::full, 2, 2, 3, -10, 10, 600 + t);
    Labeling y = testing::random_labeling(f, rng);
    Algorithm1Result res = algorithm1(f, y);
    CHECK(res.iterations <= 4 * 2);
    CHECK(is_relaxed_improving_exact(f, res.p));
    CHECK(is_strictly_improving_brute(f, res.p).improving);
  }
}

TEST_CASE("max_persistency_brute: trivial endpoints") {
  GraphicalModel z({2, 2});
  z.add_edge(0, 1);
  SubsetToOne idz = max_persistency_brute(z, {0, 0});
  CHECK(idz.total_eliminated() == 0);

  GraphicalModel f = dominant_unary_model();
  SubsetToOne full = max_persistency_brute(f, {0, 1});
  CHECK(measures(full).label_fraction == 1.0);
}

TEST_CASE("algorithm1 equals max_persistency_brute on random tiny instances") {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 8; ++t) {
    GraphicalModel f = (t % 2) ? gen_random(Family::potts, 2, 2, 2, -6, 6, 700 + t)
                               : testing::random_chain(3, 3, -6, 6, 700 + t);
    Labeling y = testing::random_labeling(f, rng);
    Algorithm1Result res = algorithm1(f, y);
    SubsetToOne best = max_persistency_brute(f, y);
    CHECK(res.p == best);
    // every enumerated member sits below the algorithm output
    CHECK(leq(best, res.p));
  }
}
