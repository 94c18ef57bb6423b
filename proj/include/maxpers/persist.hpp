#pragma once

#include <functional>
#include <optional>
#include <string>

#include "maxpers/lp.hpp"
#include "maxpers/mincut.hpp"
#include "maxpers/model.hpp"
#include "maxpers/substitution.hpp"
#include "maxpers/trws.hpp"

namespace maxpers {

enum class Mode { exact, arc_consistency, budgeted };

struct Speedups {
  bool single_node = true;
  bool pruning_cut = true;
  bool fast_messages = true;
};

struct PersistencyConfig {
  Mode mode = Mode::budgeted;
  int sweeps_per_round = 50;
  int max_outer_rounds = 0;  // 0: sum_v (|X_v| - 1)
  Speedups speedups;
  double activity_tol = 1e-7;
  double integer_activity_tol = 0.25;
  uint64_t seed = 0;
  OracleLimits oracle;
};

struct PruneCounters {
  long long active_set = 0;
  long long pruning_cut = 0;
  long long single_node = 0;
};

struct PersistencyReport {
  SubsetToOne substitution;
  Measures measure;
  std::string mode;
  int outer_rounds = 0;
  long long total_sweeps = 0;
  PruneCounters prunes;
  long long pruning_cut_invocations = 0;
  long long dichotomy_checks = 0;
  double final_lb = 0.0;
  double wall_time_s = 0.0;

  std::string to_json() const;
};

// Per-sweep trace record, emitted as JSON lines when a sink is installed.
struct SweepTrace {
  int round = 0;
  long long sweep = 0;
  double lb = 0.0;
  double problem_margin = 0.0;
  std::vector<int> active_sizes;
};
using TraceSink = std::function<void(const SweepTrace&)>;

// Approximate solution used as the common substitution target: greedy
// labeling of the dual solver after at most `budget` sweeps (or the LP
// support sets in exact mode, smallest index per node).
Labeling choose_test_labeling(const GraphicalModel& f, int budget,
                              Mode mode = Mode::budgeted,
                              const OracleLimits& limits = {});

PersistencyReport find_persistency(const GraphicalModel& f, const Labeling& y,
                                   const PersistencyConfig& cfg,
                                   const TraceSink& trace = nullptr);

PersistencyReport make_report(const SubsetToOne& p, const std::string& mode);
PersistencyReport report_from_json(const std::string& text);

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

}  // namespace maxpers
