#pragma once

#include <vector>

#include "maxpers/model.hpp"
#include "maxpers/verification.hpp"

namespace maxpers {

// Edge-disjoint cover of the edges by chains that are increasing in a total
// node order. On row-major grids the cover is the canonical rows + columns.
struct ChainDecomposition {
  std::vector<int> order;                // order[k] = node processed k-th
  std::vector<int> pos;                  // pos[node] = position in order
  std::vector<std::vector<int>> chains;  // node sequences, increasing in order
  std::vector<int> n_meet;               // chains through the node; 1 if isolated
  std::vector<int> n_first;              // chains starting at the node
  std::vector<int> n_last;               // chains ending at the node
  std::vector<char> isolated;

  int n_term(int u) const { return n_first[u] + n_last[u]; }
};

ChainDecomposition build_chains(const GraphicalModel& f, const std::vector<int>& order);

struct MessageStats {
  size_t table_reads = 0;  // pairwise table entries touched (naive mode)
  size_t f_reads = 0;      // restricted original-cost entries (reduced mode)
  size_t delta_reads = 0;  // delta entries touched (reduced mode)
  size_t reads() const { return table_reads + f_reads + delta_reads; }
};

// min_i [a(i) + g_uv(i,j)] over the stored pairwise table. from_u picks the
// side the message leaves; a is indexed by that side's labels.
std::vector<double> message_naive(const GraphicalModel& g, int e, bool from_u,
                                  const std::vector<double>& a,
                                  MessageStats* stats = nullptr);

// Same values computed through the reduction: only Y-restricted entries of
// the original costs plus the cached deltas are touched. Requires a to be
// constant on the immovable labels of the sending side.
std::vector<double> message_reduced(const ReducedCosts& r, int e, bool from_u,
                                    const std::vector<double>& a,
                                    MessageStats* stats = nullptr);

// Compact per-edge data for running the reduced kernel on a contracted
// model (label 0 is the representative).
struct FastEdge {
  std::vector<double> delta_u;  // contracted tail labels; [0] = 0
  std::vector<double> delta_v;
  std::vector<double> f_block;  // |Y_u| x |Y_v| original costs, row-major
  double rep_cost = 0.0;
};

std::vector<FastEdge> build_fast_edges(const ReducedCosts& r, const Contraction& c);

std::vector<double> message_fast_contracted(const FastEdge& fe, bool from_u,
                                            const std::vector<double>& a,
                                            MessageStats* stats = nullptr);

struct PassResult {
  double lb = 0.0;
  Labeling x;                             // greedy labeling, ties to smallest index
  std::vector<std::vector<int>> argmin;   // per-node argmin sets (within tol)
};

struct PassOptions {
  double activity_tol = 1e-7;
  const std::vector<FastEdge>* fast = nullptr;  // reduced-kernel messages
  MessageStats* stats = nullptr;
};

// One monotone pass of sequential tree-reweighted updates. The returned
// bound is f^phi_0 plus the chain terms accumulated at the terminal nodes
// of the pass direction.
PassResult forward_pass(const GraphicalModel& g, Reparametrization& phi,
                        const ChainDecomposition& dec, const PassOptions& opts = {});
PassResult backward_pass(const GraphicalModel& g, Reparametrization& phi,
                         const ChainDecomposition& dec, const PassOptions& opts = {});

// Moves pairwise slack into the nodes and normalizes unary minima to zero.
// Output satisfies: every pairwise row/column minimum is zero and every
// unary minimum is zero. A feasible input never loses lower bound.
Reparametrization dual_correct(const GraphicalModel& g, Reparametrization phi);

// Argmin sets of the reparametrized unaries, tolerance relative to the min.
std::vector<std::vector<int>> active_labels(const GraphicalModel& g,
                                            const Reparametrization& phi,
                                            double tol = 1e-7);

// Sequential greedy rounding on the reparametrized costs: nodes in order,
// each label chosen given the already-assigned neighbors (ties to the
// smallest index). Exact on converged chains even under degeneracy.
Labeling conditioned_labeling(const GraphicalModel& g, const Reparametrization& phi,
                              const ChainDecomposition& dec);

// One sweep of max-sum diffusion: averages slack between every unary and
// its incident pairwise rows. Fixed points satisfy node-edge agreement
// min_j f^phi_uv(i,j) = f^phi_u(i), the form arc consistency speaks about.
// Returns the largest agreement residual seen before updating.
double diffusion_pass(const GraphicalModel& g, Reparametrization& phi);

struct MarginReport {
  std::vector<double> node_margins;
  double problem_margin = 0.0;
};

// Node margin min_i f^phi_u(i) - f^phi_u(y_u); zero iff y_u is locally
// optimal, negative otherwise.
MarginReport margin(const GraphicalModel& g, const Reparametrization& phi,
                    const Labeling& y);

struct ArcConsistencyViolation {
  enum Kind { pairwise_endpoint, missing_partner } kind;
  int edge;
  int node;
  int label;
  int other_label;  // -1 for missing_partner
};

struct ArcConsistencyReport {
  bool consistent = true;
  std::vector<ArcConsistencyViolation> violations;
};

// Both clauses of arc consistency on the activity sets: every active
// pairwise entry has active endpoints, and every active label has an active
// pairwise partner toward each neighbor.
ArcConsistencyReport arc_consistency_check(const GraphicalModel& g,
                                           const Reparametrization& phi,
                                           double tol = 1e-7);

}  // namespace maxpers
