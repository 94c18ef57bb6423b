#pragma once

#include <array>
#include <vector>

#include "maxpers/model.hpp"
#include "maxpers/verification.hpp"

namespace maxpers {

// Two-label energy over the nodes that a move labeling unfixes. State 0 is
// the test label, state 1 the alternative; every pairwise table is
// submodular by the reduction.
struct BinaryEnergy {
  struct Node {
    int original;  // model node id
    int label0;    // y_v
    int label1;    // x_v
  };
  struct PairTable {
    int a, b;       // indices into nodes
    double t[2][2];  // t[s_a][s_b]
  };
  std::vector<Node> nodes;
  std::vector<PairTable> edges;
  std::vector<double> unary0, unary1;
  double constant = 0.0;

  double evaluate(const std::vector<int>& states) const;
};

// Restriction of the reduced costs to the move between y and x. Nodes with
// x_v == y_v are fixed and folded into neighbors' unaries. Asserts
// submodularity of every restricted table.
BinaryEnergy restrict_to_move(const ReducedCosts& r, const Labeling& x);

// Dinic max-flow on a dense-enough residual graph; capacities stay exact
// for integral inputs.
class FlowNetwork {
 public:
  explicit FlowNetwork(int num_nodes);  // plus implicit source/sink
  int source() const { return n_; }
  int sink() const { return n_ + 1; }
  void add_arc(int from, int to, double capacity);

  double max_flow();
  // After max_flow: nodes reachable from the source in the residual graph.
  std::vector<char> source_reachable() const;
  // Nodes that still reach the sink in the residual graph.
  std::vector<char> sink_coreachable() const;

 private:
  struct Arc {
    int to;
    double cap;
    int rev;
  };
  bool bfs_levels();
  double dfs_push(int v, double limit);

  int n_;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<int> level_;
  std::vector<size_t> iter_;
};

struct MinCutSupport {
  // achievable[k][s]: state s of binary node k occurs in some minimizer.
  std::vector<std::array<bool, 2>> achievable;
  double min_value = 0.0;
};

// Solves the submodular binary problem by min-cut and reads achievability
// off the two extremal minimum cuts (the cut lattice makes them sufficient).
MinCutSupport min_cut_support(const BinaryEnergy& b);

// Negative-labeling speed-up: after solving the move restriction, drop x_v
// from Y_v wherever the alternative state is achievable. Guarantees at
// least one removal when energy(bar g, x) < 0.
int pruning_cut(const ReducedCosts& r, SubsetToOne& p, const Labeling& x);

// Star-sum speed-up: removes i from Y_v whenever
// bar g_v(i) + sum_u bar g_vu(i, y_u) <= 0, propagating with a worklist and
// keeping the deltas in sync with the shrinking Y.
int single_node_prune(const GraphicalModel& f, SubsetToOne& p);

}  // namespace maxpers
