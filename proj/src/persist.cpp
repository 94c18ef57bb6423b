#include "maxpers/persist.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace maxpers {

namespace {

int elimination_bound(const GraphicalModel& f) {
  int total = 0;
  for (int v = 0; v < f.num_nodes(); ++v) total += f.num_labels(v) - 1;
  return total;
}

std::vector<int> natural_order(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::exact:
      return "exact";
    case Mode::arc_consistency:
      return "arc_consistency";
    case Mode::budgeted:
      return "budgeted";
  }
  return "budgeted";
}

Mode mode_from_name(const std::string& name) {
  if (name == "exact") return Mode::exact;
  if (name == "arc_consistency" || name == "ac") return Mode::arc_consistency;
  if (name == "budgeted") return Mode::budgeted;
  throw std::runtime_error("unknown mode '" + name + "'");
}

PersistencyReport make_report(const SubsetToOne& p, const std::string& mode) {
  PersistencyReport rep;
  rep.substitution = p;
  rep.measure = measures(p);
  rep.mode = mode;
  return rep;
}

std::string PersistencyReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["mode"] = mode;
  j["num_labels"] = substitution.labels();
  j["substitution"]["y"] = substitution.y();
  {
    std::vector<std::vector<int>> elim;
    for (int v = 0; v < substitution.num_nodes(); ++v)
      elim.push_back(substitution.eliminated(v));
    j["substitution"]["eliminated"] = elim;
  }
  {
    std::vector<int> remaining;
    for (int v = 0; v < substitution.num_nodes(); ++v)
      remaining.push_back(substitution.num_labels(v) -
                          static_cast<int>(substitution.eliminated(v).size()));
    j["remaining_labels"] = remaining;
  }
  j["measures"]["label_fraction"] = measure.label_fraction;
  j["measures"]["log_fraction"] = measure.log_fraction;
  j["counters"]["outer_rounds"] = outer_rounds;
  j["counters"]["total_sweeps"] = total_sweeps;
  j["counters"]["prunes"]["active_set"] = prunes.active_set;
  j["counters"]["prunes"]["pruning_cut"] = prunes.pruning_cut;
  j["counters"]["prunes"]["single_node"] = prunes.single_node;
  j["counters"]["pruning_cut_invocations"] = pruning_cut_invocations;
  j["counters"]["dichotomy_checks"] = dichotomy_checks;
  j["final_lb"] = final_lb;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2);
}

PersistencyReport report_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  require(j.at("schema_version").get<int>() == 1, "unsupported report schema version");
  auto labels = j.at("num_labels").get<std::vector<int>>();
  SubsetToOne p(labels, j.at("substitution").at("y").get<Labeling>());
  auto elim = j.at("substitution").at("eliminated").get<std::vector<std::vector<int>>>();
  require(elim.size() == labels.size(), "eliminated length mismatch");
  for (size_t v = 0; v < elim.size(); ++v)
    for (int i : elim[v]) p.add(static_cast<int>(v), i);
  PersistencyReport rep = make_report(p, j.at("mode").get<std::string>());
  const auto& c = j.at("counters");
  rep.outer_rounds = c.at("outer_rounds").get<int>();
  rep.total_sweeps = c.at("total_sweeps").get<long long>();
  rep.prunes.active_set = c.at("prunes").at("active_set").get<long long>();
  rep.prunes.pruning_cut = c.at("prunes").at("pruning_cut").get<long long>();
  rep.prunes.single_node = c.at("prunes").at("single_node").get<long long>();
  rep.pruning_cut_invocations = c.at("pruning_cut_invocations").get<long long>();
  rep.dichotomy_checks = c.at("dichotomy_checks").get<long long>();
  rep.final_lb = j.at("final_lb").get<double>();
  rep.wall_time_s = j.at("wall_time_s").get<double>();
  return rep;
}

Labeling choose_test_labeling(const GraphicalModel& f, int budget, Mode mode,
                              const OracleLimits& limits) {
  if (mode == Mode::exact) {
    SupportSets supports = support_sets(f, limits);
    Labeling y(f.num_nodes(), 0);
    for (int v = 0; v < f.num_nodes(); ++v) {
      require(!supports.sets[v].empty(), "optimal support cannot be empty");
      y[v] = supports.sets[v].front();
    }
    return y;
  }
  ChainDecomposition dec = build_chains(f, natural_order(f.num_nodes()));
  Reparametrization phi(f);
  PassResult last;
  double prev_lb = -std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int s = 0; s < std::max(budget, 1); ++s) {
    forward_pass(f, phi, dec);
    last = backward_pass(f, phi, dec);
    if (f.integer_costs() &&
        energy(f, conditioned_labeling(f, phi, dec)) - last.lb < 0.5)
      break;  // bound gap below one: proven optimal
    if (last.lb - prev_lb <= 1e-12 * (1.0 + std::abs(last.lb))) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }
    prev_lb = last.lb;
  }
  // Conditioned rounding resolves argmin ties that the independent greedy
  // labeling can mix across degenerate optima.
  Labeling rounded = conditioned_labeling(f, phi, dec);
  return energy(f, rounded) <= energy(f, last.x) ? rounded : last.x;
}

namespace {

PersistencyReport run_exact(const GraphicalModel& f, const Labeling& y,
                            const PersistencyConfig& cfg) {
  Stopwatch watch;
  Algorithm1Result res = algorithm1(f, y, cfg.oracle);
  PersistencyReport rep = make_report(res.p, mode_name(cfg.mode));
  rep.outer_rounds = res.iterations;
  rep.final_lb = solve_lp(verification_costs(f, res.p), cfg.oracle).value;
  rep.wall_time_s = watch.seconds();
  return rep;
}

PersistencyReport run_dual(const GraphicalModel& f, const Labeling& y,
                           const PersistencyConfig& cfg, const TraceSink& trace) {
  Stopwatch watch;
  require(cfg.sweeps_per_round >= 1, "sweeps_per_round must be positive");
  const int bound = elimination_bound(f);
  const int max_rounds = cfg.max_outer_rounds > 0 ? cfg.max_outer_rounds : bound;
  const bool integer = f.integer_costs();
  const double tol = integer ? cfg.integer_activity_tol : cfg.activity_tol;
  const double neg_tol = integer ? 0.5 : 1e-9;

  SubsetToOne p = SubsetToOne::full(f, y);
  PersistencyReport rep = make_report(p, mode_name(cfg.mode));
  ChainDecomposition dec = build_chains(f, natural_order(f.num_nodes()));

  Reparametrization phi;
  std::vector<std::vector<int>> prev_to_contracted;
  bool warm = false;

  auto finish = [&](double lb) {
    rep.substitution = p;
    rep.measure = measures(p);
    rep.final_lb = lb;
    rep.wall_time_s = watch.seconds();
    return rep;
  };

  while (true) {
    if (rep.outer_rounds >= max_rounds) {
      // A premature cap would otherwise hand back an unverified
      // substitution; the identity is the sound fallback.
      p = SubsetToOne(f.labels(), y);
      return finish(0.0);
    }
    ++rep.outer_rounds;

    if (cfg.speedups.single_node) rep.prunes.single_node += single_node_prune(f, p);
    if (p.total_eliminated() == 0) return finish(0.0);

    ReducedCosts r = reduce(f, p);
    Contraction con = contract(r);
    std::vector<FastEdge> fast;
    if (cfg.speedups.fast_messages) fast = build_fast_edges(r, con);

    Reparametrization fresh(con.model);
    if (warm) {
      // Surviving labels keep their messages; dropped ones merge into the
      // representative and the next correction restores the invariants.
      for (int e = 0; e < con.model.num_edges(); ++e) {
        int u = con.model.edge(e).u, v = con.model.edge(e).v;
        for (int c = 0; c < con.model.num_labels(u); ++c)
          fresh.at_u(e)[c] =
              phi.at_u(e)[prev_to_contracted[u][con.to_original[u][c]]];
        for (int c = 0; c < con.model.num_labels(v); ++c)
          fresh.at_v(e)[c] =
              phi.at_v(e)[prev_to_contracted[v][con.to_original[v][c]]];
      }
      for (int v = 0; v < con.model.num_nodes(); ++v)
        fresh.node_offset(v) = phi.node_offset(v);
    }
    phi = std::move(fresh);
    prev_to_contracted = con.to_contracted;
    warm = true;

    PassOptions opts;
    opts.activity_tol = tol;
    if (cfg.speedups.fast_messages) opts.fast = &fast;

    bool restart_outer = false;
    std::vector<std::vector<int>> last_active;
    for (int s = 1; s <= cfg.sweeps_per_round && !restart_outer; ++s) {
      forward_pass(con.model, phi, dec, opts);
      PassResult bwd = backward_pass(con.model, phi, dec, opts);
      ++rep.total_sweeps;

      Labeling guess = bwd.x;
      if (cfg.speedups.pruning_cut) {
        Labeling rounded = conditioned_labeling(con.model, phi, dec);
        if (energy(con.model, rounded) < energy(con.model, guess)) guess = rounded;
      }
      if (cfg.speedups.pruning_cut && energy(con.model, guess) < -neg_tol) {
        Labeling x = con.uncontract(guess);
        ++rep.pruning_cut_invocations;
        int removed = pruning_cut(r, p, x);
        rep.prunes.pruning_cut += removed;
        require(removed >= 1, "negative labeling must force at least one removal");
        restart_outer = true;
        break;
      }

      Reparametrization corrected = dual_correct(con.model, phi);
      auto has_overlap = [](const std::vector<std::vector<int>>& sets) {
        for (const auto& set : sets)
          for (int c : set)
            if (c >= 1) return true;
        return false;
      };
      auto optimality_witness = [&](double value) {
        return integer ? value > -0.5 : std::abs(value) <= 1e-7;
      };
      std::vector<std::vector<int>> active = active_labels(con.model, corrected, tol);
      double lb = reparametrized_constant(con.model, corrected);
      ++rep.dichotomy_checks;
      bool overlap = has_overlap(active);
      if (!overlap)
        require(optimality_witness(lb), "dichotomy violated: no overlap but LB != 0");

      if (overlap && optimality_witness(lb)) {
        // The bound already certifies optimality, so the overlap may be
        // pure dual degeneracy. Rebalancing slack inside the optimal face
        // often exposes a point whose actives avoid Y.
        Reparametrization diffused = corrected;
        for (int d = 0; d < 200 && diffusion_pass(con.model, diffused) > 1e-10; ++d) {
        }
        diffused = dual_correct(con.model, diffused);
        double lb2 = reparametrized_constant(con.model, diffused);
        if (lb2 >= lb - 1e-9) {
          std::vector<std::vector<int>> active2 = active_labels(con.model, diffused, tol);
          ++rep.dichotomy_checks;
          bool overlap2 = has_overlap(active2);
          if (!overlap2)
            require(optimality_witness(lb2), "dichotomy violated: no overlap but LB != 0");
          corrected = std::move(diffused);
          active = std::move(active2);
          lb = lb2;
          overlap = overlap2;
        }
      }

      if (trace) {
        SweepTrace t;
        t.round = rep.outer_rounds;
        t.sweep = rep.total_sweeps;
        t.lb = lb;
        t.problem_margin =
            margin(con.model, corrected, Labeling(con.model.num_nodes(), 0))
                .problem_margin;
        for (const auto& set : active) t.active_sizes.push_back(static_cast<int>(set.size()));
        trace(t);
      }

      if (!overlap) {
        bool done = cfg.mode == Mode::budgeted;
        if (cfg.mode == Mode::arc_consistency) {
          // Exit on arc consistency of the diffusion-normalized point, or
          // by the optimality dichotomy once the sweep budget of this
          // round is spent.
          Reparametrization diffused = corrected;
          for (int d = 0; d < 50 && diffusion_pass(con.model, diffused) > 1e-9; ++d) {
          }
          done = arc_consistency_check(con.model, diffused, tol).consistent ||
                 s == cfg.sweeps_per_round;
        }
        if (done) return finish(lb);
      }
      last_active = std::move(active);
    }
    if (restart_outer) continue;

    int removed = 0;
    for (int v = 0; v < con.model.num_nodes(); ++v)
      for (int c : last_active[v])
        if (c >= 1 && p.remove(v, con.to_original[v][c])) ++removed;
    rep.prunes.active_set += removed;
    require(removed >= 1, "non-terminal round must prune");
    if (p.total_eliminated() == 0) return finish(0.0);
  }
}

}  // namespace

PersistencyReport find_persistency(const GraphicalModel& f, const Labeling& y,
                                   const PersistencyConfig& cfg, const TraceSink& trace) {
  f.check_labeling(y);
  if (cfg.mode == Mode::exact) return run_exact(f, y, cfg);
  return run_dual(f, y, cfg, trace);
}

}  // namespace maxpers
