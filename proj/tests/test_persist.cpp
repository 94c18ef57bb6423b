#include "doctest.h"
#include "maxpers/persist.hpp"
#include "test_support.hpp"

using namespace maxpers;

namespace {

GraphicalModel dominant_unary_model() {
  GraphicalModel f({3, 3});
  f.unary_table(0) = {0, 5, 9};
  f.unary_table(1) = {7, 0, 6};
  f.add_edge(0, 1);
  f.set_integer_costs(true);
  return f;
}

int movable_total(const GraphicalModel& f) {
  int total = 0;
  for (int v = 0; v < f.num_nodes(); ++v) total += f.num_labels(v) - 1;
  return total;
}

}  // namespace

TEST_CASE("choose_test_labeling: dominant unaries pick the argmins") {
  GraphicalModel f = dominant_unary_model();
  CHECK(choose_test_labeling(f, 100) == Labeling{0, 1});
  CHECK(choose_test_labeling(f, 100, Mode::exact) == Labeling{0, 1});
}

TEST_CASE("choose_test_labeling: exact MAP on trees, deterministic") {
  for (int t = 0; t < 10; ++t) {
    GraphicalModel f = testing::random_chain(5, 3, -9, 9, 4000 + t);
    Labeling y = choose_test_labeling(f, 200);
    CHECK(energy(f, y) == doctest::Approx(brute_force_min(f).first));
    CHECK(choose_test_labeling(f, 200) == y);
  }
}

TEST_CASE("find_persistency: zero costs give the identity substitution in one round") {
  GraphicalModel f({3, 3});
  f.add_edge(0, 1);
  f.set_integer_costs(true);
  PersistencyConfig cfg;
  PersistencyReport rep = find_persistency(f, {0, 0}, cfg);
  CHECK(rep.substitution.total_eliminated() == 0);
  CHECK(rep.measure.label_fraction == 0.0);
  CHECK(rep.outer_rounds == 1);
}

TEST_CASE("find_persistency: dominant unaries fully eliminated in one round") {
  GraphicalModel f = dominant_unary_model();
  PersistencyConfig cfg;
  PersistencyReport rep = find_persistency(f, {0, 1}, cfg);
  CHECK(rep.measure.label_fraction == 1.0);
  CHECK(rep.outer_rounds == 1);
  CHECK(rep.final_lb == doctest::Approx(0.0));
}

TEST_CASE("find_persistency: every mode is sound on random instances") {
  std::mt19937_64 rng(81);
  for (int t = 0; t < 25; ++t) {
    GraphicalModel f = (t % 2) ? gen_random(Family::full, 2, 2, 3, -10, 10, 5000 + t)
                               : testing::random_cycle(4, 3, -10, 10, 5000 + t, t % 4 == 0);
    Labeling y = choose_test_labeling(f, 100);
    for (Mode mode : {Mode::exact, Mode::arc_consistency, Mode::budgeted}) {
      PersistencyConfig cfg;
      cfg.mode = mode;
      PersistencyReport rep = find_persistency(f, y, cfg);
      CHECK(is_strictly_improving_brute(f, rep.substitution).improving);
      CHECK(rep.outer_rounds <= movable_total(f));
    }
  }
}

TEST_CASE("find_persistency: budgeted never beats exact; ties on easy instances") {
  std::mt19937_64 rng(82);
  int ties = 0;
  for (int t = 0; t < 20; ++t) {
    GraphicalModel f = gen_random(Family::full, 2, 2, 3, -9, 9, 5100 + t);
    Labeling y = choose_test_labeling(f, 200);
    PersistencyConfig exact_cfg;
    exact_cfg.mode = Mode::exact;
    PersistencyConfig dual_cfg;
    dual_cfg.sweeps_per_round = 200;
    PersistencyReport ex = find_persistency(f, y, exact_cfg);
    PersistencyReport du = find_persistency(f, y, dual_cfg);
    CHECK(du.measure.label_fraction <= ex.measure.label_fraction + 1e-12);
    CHECK(leq(du.substitution, ex.substitution));
    if (du.measure.label_fraction == ex.measure.label_fraction) ++ties;
  }
  CHECK(ties >= 10);  // generous budgets recover the maximum on most of these
}

namespace {

// Exact pipeline with both loss-free prunings switched on: exhaustive
// negative labelings of the reduced problem feed pruning cuts, single-node
// pruning runs before each rebuild, and the LP supports of the reduced
// problem drive the remaining prunes. Per the reduction and refinement
// theorems this must land on the same maximum as the plain LP pipeline.
SubsetToOne exact_with_speedups(const GraphicalModel& f, const Labeling& y) {
  SubsetToOne p = SubsetToOne::full(f, y);
  while (true) {
    single_node_prune(f, p);
    if (p.total_eliminated() == 0) return p;
    ReducedCosts r = reduce(f, p);
    auto [min_value, min_x] = brute_force_min(r.base());
    if (min_value < 0) {
      int removed = pruning_cut(r, p, min_x);
      require(removed >= 1, "negative labeling must prune");
      continue;
    }
    SupportSets supports = support_sets(r.base());
    if (supports.fixes(p)) return p;
    int removed = 0;
    for (int v = 0; v < f.num_nodes(); ++v)
      for (int i : supports.sets[v])
        if (p.remove(v, i)) ++removed;
    require(removed >= 1, "non-terminal iteration must prune");
  }
}

}  // namespace

TEST_CASE("speedups are loss-free for the exact pipeline") {
  std::mt19937_64 rng(83);
  for (int t = 0; t < 25; ++t) {
    GraphicalModel f = (t % 2) ? gen_random(Family::potts, 2, 2, 3, -10, 10, 5200 + t)
                               : gen_random(Family::full, 2, 2, 3, -10, 10, 5200 + t);
    Labeling y = testing::random_labeling(f, rng);
    SubsetToOne with_speedups = exact_with_speedups(f, y);
    Algorithm1Result plain = algorithm1(f, y);
    CHECK(with_speedups == plain.p);
  }
}

TEST_CASE("find_persistency: speedup combinations all stay sound") {
  std::mt19937_64 rng(85);
  for (int t = 0; t < 10; ++t) {
    GraphicalModel f = gen_random(Family::potts, 2, 3, 3, -10, 10, 5400 + t);
    Labeling y = choose_test_labeling(f, 100);
    for (int mask = 0; mask < 8; ++mask) {
      PersistencyConfig cfg;
      cfg.speedups.single_node = mask & 1;
      cfg.speedups.pruning_cut = mask & 2;
      cfg.speedups.fast_messages = mask & 4;
      PersistencyReport rep = find_persistency(f, y, cfg);
      CHECK(is_strictly_improving_brute(f, rep.substitution).improving);
    }
  }
}

TEST_CASE("find_persistency: exact mode reproduces algorithm1") {
  std::mt19937_64 rng(84);
  for (int t = 0; t < 10; ++t) {
    GraphicalModel f = gen_random(Family::full, 2, 2, 3, -8, 8, 5300 + t);
    Labeling y = testing::random_labeling(f, rng);
    PersistencyConfig cfg;
    cfg.mode = Mode::exact;
    PersistencyReport rep = find_persistency(f, y, cfg);
    Algorithm1Result alg = algorithm1(f, y);
    CHECK(rep.substitution == alg.p);
    CHECK(rep.outer_rounds == alg.iterations);
  }
}

TEST_CASE("find_persistency: trace emits one record per corrected sweep") {
  GraphicalModel f = gen_random(Family::potts, 3, 3, 3, 0, 30, 99);
  Labeling y = choose_test_labeling(f, 50);
  PersistencyConfig cfg;
  cfg.sweeps_per_round = 5;
  std::vector<SweepTrace> records;
  find_persistency(f, y, cfg, [&](const SweepTrace& t) { records.push_back(t); });
  CHECK(!records.empty());
  for (size_t k = 0; k < records.size(); ++k) {
    CHECK(records[k].active_sizes.size() == static_cast<size_t>(f.num_nodes()));
    if (k) CHECK(records[k].sweep > records[k - 1].sweep);
  }
}

TEST_CASE("find_persistency: premature round cap falls back to the identity") {
  GraphicalModel f = gen_random(Family::full, 2, 2, 3, -9, 9, 777);
  Labeling y = choose_test_labeling(f, 50);
  PersistencyConfig cfg;
  cfg.max_outer_rounds = 1;
  cfg.sweeps_per_round = 1;
  cfg.speedups.pruning_cut = false;
  cfg.speedups.single_node = false;
  PersistencyReport rep = find_persistency(f, y, cfg);
  // either it finished legitimately within the cap or returned the identity
  CHECK(is_strictly_improving_brute(f, rep.substitution).improving);
}

TEST_CASE("report: measures endpoints and JSON round trip") {
  GraphicalModel f = dominant_unary_model();
  SubsetToOne id(f.labels(), {0, 1});
  PersistencyReport r0 = make_report(id, "budgeted");
  CHECK(r0.measure.label_fraction == 0.0);
  CHECK(r0.measure.log_fraction == 0.0);

  PersistencyReport r1 = make_report(SubsetToOne::full(f, {0, 1}), "exact");
  CHECK(r1.measure.label_fraction == 1.0);

  SubsetToOne two({2, 100}, {0, 0});
  two.add(0, 1);
  PersistencyReport r2 = make_report(two, "budgeted");
  r2.outer_rounds = 3;
  r2.total_sweeps = 12;
  r2.final_lb = -0.25;
  PersistencyReport back = report_from_json(r2.to_json());
  CHECK(back.substitution == r2.substitution);
  CHECK(back.outer_rounds == 3);
  CHECK(back.total_sweeps == 12);
  CHECK(back.final_lb == -0.25);
  CHECK(back.measure.label_fraction == doctest::Approx(0.01));
  CHECK(back.measure.log_fraction == doctest::Approx(0.1308).epsilon(1e-3));
}
