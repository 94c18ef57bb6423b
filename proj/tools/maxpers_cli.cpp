#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "maxpers/persist.hpp"
#include "maxpers/random_models.hpp"
#include "maxpers/uai.hpp"

using namespace maxpers;
using nlohmann::json;

namespace {

int log_level() {
  const char* env = std::getenv("PERSIST_LOG");
  return env ? std::atoi(env) : 0;
}

void log_line(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "[maxpers] " << msg << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open " + path + " for writing");
  out << text;
  require(out.good(), "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PersistFlags {
  std::string mode = "budgeted";
  int sweeps_per_round = 50;
  int budget = 1000;
  uint64_t seed = 0;
  bool no_single_node = false;
  bool no_pruning_cut = false;
  bool naive_messages = false;
  std::string emit_remainder;
  std::string trace_path;
};

PersistencyConfig to_config(const PersistFlags& fl) {
  PersistencyConfig cfg;
  cfg.mode = mode_from_name(fl.mode);
  cfg.sweeps_per_round = fl.sweeps_per_round;
  cfg.seed = fl.seed;
  cfg.speedups.single_node = !fl.no_single_node;
  cfg.speedups.pruning_cut = !fl.no_pruning_cut;
  cfg.speedups.fast_messages = !fl.naive_messages;
  return cfg;
}

int run_gen(const std::string& family, int rows, int cols, int labels, int64_t lo,
            int64_t hi, uint64_t seed, const std::string& out_path) {
  Family fam;
  if (family == "potts")
    fam = Family::potts;
  else if (family == "full")
    fam = Family::full;
  else
    throw std::runtime_error("unknown family '" + family + "'");
  GraphicalModel f = gen_random(fam, rows, cols, labels, lo, hi, seed);
  write_text(out_path, serialize_uai(f));
  json side;
  side["family"] = family;
  side["rows"] = rows;
  side["cols"] = cols;
  side["labels"] = labels;
  side["cost_range"] = {lo, hi};
  side["seed"] = seed;
  if (out_path != "-") write_text(out_path + ".json", side.dump(2) + "\n");
  log_line(1, "generated " + std::to_string(f.num_nodes()) + " nodes, " +
                  std::to_string(f.num_edges()) + " edges");
  return 0;
}

int run_solve(const std::string& input, int sweeps, const std::string& out_path) {
  GraphicalModel f = load_uai_file(input);
  std::vector<int> order(f.num_nodes());
  for (int v = 0; v < f.num_nodes(); ++v) order[v] = v;
  ChainDecomposition dec = build_chains(f, order);
  Reparametrization phi(f);
  PassResult last;
  for (int s = 0; s < sweeps; ++s) {
    forward_pass(f, phi, dec);
    last = backward_pass(f, phi, dec);
  }
  json out;
  out["lower_bound"] = last.lb;
  out["labeling"] = last.x;
  out["energy"] = energy(f, last.x);
  out["sweeps"] = sweeps;
  write_text(out_path, out.dump(2) + "\n");
  return 0;
}

int run_persist(const std::string& input, const PersistFlags& fl,
                const std::string& y_path, const std::string& out_path) {
  GraphicalModel f = load_uai_file(input);
  PersistencyConfig cfg = to_config(fl);
  Labeling y;
  if (!y_path.empty()) {
    json jy = json::parse(read_text(y_path));
    y = jy.at("y").get<Labeling>();
  } else {
    y = choose_test_labeling(f, fl.budget, cfg.mode, cfg.oracle);
  }
  TraceSink sink;
  std::ofstream trace_out;
  if (!fl.trace_path.empty()) {
    trace_out.open(fl.trace_path, std::ios::binary);
    require(trace_out.good(), "cannot open " + fl.trace_path + " for writing");
    sink = [&trace_out](const SweepTrace& t) {
      json line;
      line["round"] = t.round;
      line["sweep"] = t.sweep;
      line["lb"] = t.lb;
      line["margin"] = t.problem_margin;
      line["active_sizes"] = t.active_sizes;
      trace_out << line.dump() << "\n";
    };
  }
  PersistencyReport rep = find_persistency(f, y, cfg, sink);
  write_text(out_path, rep.to_json() + "\n");
  if (!fl.emit_remainder.empty()) {
    ReducedCosts r = reduce(f, rep.substitution);
    Contraction con = contract(r);
    save_uai_file(con.model, fl.emit_remainder);
  }
  log_line(1, "eliminated fraction " + std::to_string(rep.measure.label_fraction));
  return 0;
}

std::string render_pgm(const std::vector<int>& values, int rows, int cols, int maxval) {
  require(maxval >= 1 && maxval <= 255, "PGM maxval out of range");
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n" +
                    std::to_string(maxval) + "\n";
  for (int value : values) out.push_back(static_cast<char>(value));
  return out;
}

int run_render(const std::string& report_path, int rows, int cols,
               const std::string& out_path, const std::string& unique_path) {
  PersistencyReport rep = report_from_json(read_text(report_path));
  const SubsetToOne& p = rep.substitution;
  require(rows * cols == p.num_nodes(), "geometry mismatch: rows*cols != node count");
  std::vector<int> remaining(p.num_nodes());
  int maxval = 1;
  for (int v = 0; v < p.num_nodes(); ++v) {
    remaining[v] = p.num_labels(v) - static_cast<int>(p.eliminated(v).size());
    maxval = std::max(maxval, p.num_labels(v));
  }
  write_text(out_path, render_pgm(remaining, rows, cols, maxval));
  if (!unique_path.empty()) {
    std::vector<int> unique(p.num_nodes());
    for (int v = 0; v < p.num_nodes(); ++v) unique[v] = remaining[v] == 1 ? 255 : 0;
    write_text(unique_path, render_pgm(unique, rows, cols, 255));
  }
  return 0;
}

int run_stats(const std::vector<std::string>& reports, const std::string& out_path) {
  require(!reports.empty(), "stats needs at least one report");
  auto stat = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = xs.size() > 1 ? var / (xs.size() - 1) : 0.0;
    json j;
    j["mean"] = mean;
    j["stddev"] = std::sqrt(var);
    return j;
  };
  std::vector<double> label_fraction, log_fraction, wall_time, rounds;
  for (const std::string& path : reports) {
    PersistencyReport rep = report_from_json(read_text(path));
    label_fraction.push_back(rep.measure.label_fraction);
    log_fraction.push_back(rep.measure.log_fraction);
    wall_time.push_back(rep.wall_time_s);
    rounds.push_back(static_cast<double>(rep.outer_rounds));
  }
  json out;
  out["count"] = reports.size();
  out["label_fraction"] = stat(label_fraction);
  out["log_fraction"] = stat(log_fraction);
  out["wall_time_s"] = stat(wall_time);
  out["outer_rounds"] = stat(rounds);
  write_text(out_path, out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial optimality (persistency) toolkit for pairwise models"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a random grid instance");
  std::string gen_family = "potts";
  int gen_rows = 10, gen_cols = 10, gen_labels = 3;
  int64_t gen_lo = 0, gen_hi = 100;
  uint64_t gen_seed = 0;
  std::string gen_out = "-";
  gen->add_option("--family", gen_family, "potts or full");
  gen->add_option("--rows", gen_rows)->check(CLI::PositiveNumber);
  gen->add_option("--cols", gen_cols)->check(CLI::PositiveNumber);
  gen->add_option("--labels", gen_labels);
  gen->add_option("--min", gen_lo, "cost range lower bound");
  gen->add_option("--max", gen_hi, "cost range upper bound");
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--output", gen_out, "output UAI path ('-' for stdout)");

  auto* solve = app.add_subcommand("solve", "run the dual solver on a model");
  std::string solve_in, solve_out = "-";
  int solve_sweeps = 100;
  solve->add_option("input", solve_in)->required();
  solve->add_option("--sweeps", solve_sweeps)->check(CLI::PositiveNumber);
  solve->add_option("-o,--output", solve_out);

  auto* persist = app.add_subcommand("persist", "compute an improving substitution");
  std::string persist_in, persist_out = "-", persist_y;
  PersistFlags fl;
  persist->add_option("input", persist_in)->required();
  persist->add_option("--mode", fl.mode, "exact, arc_consistency (ac), or budgeted");
  persist->add_option("--sweeps-per-round", fl.sweeps_per_round)->check(CLI::PositiveNumber);
  persist->add_option("--budget", fl.budget, "sweeps for the initial test labeling");
  persist->add_option("--seed", fl.seed);
  persist->add_flag("--no-single-node", fl.no_single_node, "disable single-node pruning");
  persist->add_flag("--no-pruning-cut", fl.no_pruning_cut, "disable negative-labeling cuts");
  persist->add_flag("--naive-messages", fl.naive_messages, "disable the reduced message kernel");
  persist->add_option("--emit-remainder", fl.emit_remainder, "write the contracted remainder model (UAI)");
  persist->add_option("--trace", fl.trace_path, "write per-sweep JSON lines");
  persist->add_option("--y", persist_y, "JSON file with a test labeling {\"y\": [...]}");
  persist->add_option("-o,--output", persist_out);

  auto* render = app.add_subcommand("render", "render a report as PGM maps");
  std::string render_report, render_out, render_unique;
  int render_rows = 0, render_cols = 0;
  render->add_option("report", render_report)->required();
  render->add_option("--rows", render_rows)->required();
  render->add_option("--cols", render_cols)->required();
  render->add_option("-o,--output", render_out, "remaining-label map (PGM)")->required();
  render->add_option("--unique", render_unique, "optional determined-unique mask (PGM)");

  auto* stats = app.add_subcommand("stats", "aggregate persistency reports");
  std::vector<std::string> stats_reports;
  std::string stats_out = "-";
  stats->add_option("reports", stats_reports, "report JSON files");
  stats->add_option("-o,--output", stats_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed())
      return run_gen(gen_family, gen_rows, gen_cols, gen_labels, gen_lo, gen_hi,
                     gen_seed, gen_out);
    if (solve->parsed()) return run_solve(solve_in, solve_sweeps, solve_out);
    if (persist->parsed()) return run_persist(persist_in, fl, persist_y, persist_out);
    if (render->parsed())
      return run_render(render_report, render_rows, render_cols, render_out,
                        render_unique);
    if (stats->parsed()) return run_stats(stats_reports, stats_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
