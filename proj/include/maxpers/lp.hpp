#pragma once

#include <optional>
#include <vector>

#include "maxpers/model.hpp"
#include "maxpers/substitution.hpp"

namespace maxpers {

struct SizeLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Desk-scale guard rails for the exact oracle.
struct OracleLimits {
  int max_nodes = 12;
  int max_labels = 5;
  double max_enumeration = 1e7;   // labelings for brute-force checks
  double max_families = 1 << 20;  // Y-set combinations for the enumeration oracle

  void check_lp(const GraphicalModel& f) const;
};

// Dense equality-form LP: min c^T x, A x = b, x >= 0. Primal simplex with
// Bland's anti-cycling rule; oracle scale only, not a production solver.
class DenseSimplex {
 public:
  DenseSimplex(int num_vars);
  void set_objective(int var, double coeff);
  // Rows are equality constraints; coefficients default to zero.
  int add_row(double rhs);
  void set_coeff(int row, int var, double value);

  struct Result {
    bool feasible = true;
    double value = 0.0;
    std::vector<double> x;
  };
  Result solve() const;

 private:
  int n_;
  std::vector<double> c_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
};

// Standard local polytope relaxation of a model's energy: marginalization,
// normalization and nonnegativity over the lifted coordinates.
class LocalPolytopeLP {
 public:
  explicit LocalPolytopeLP(const GraphicalModel& g,
                           const std::vector<int>* var_order = nullptr);

  int num_vars() const { return num_vars_; }
  int var_const() const { return order_[0]; }
  int var_unary(int v, int i) const { return order_[unary_base_[v] + i]; }
  int var_pairwise(int e, int i, int j) const {
    return order_[pairwise_base_[e] +
                  i * model_->num_labels(model_->edge(e).v) + j];
  }
  const GraphicalModel& model() const { return *model_; }

  // min <g, mu> over the polytope; optionally with the extra constraint
  // <g, mu> = anchor (for optimal-face probing) and a different objective.
  DenseSimplex::Result minimize(const std::vector<double>* objective = nullptr,
                                std::optional<double> anchor = std::nullopt) const;

  LiftedPoint to_lifted(const std::vector<double>& x) const;
  std::vector<double> cost_coeffs() const;  // g flattened in variable order

 private:
  const GraphicalModel* model_;
  int num_vars_;
  std::vector<int> unary_base_;
  std::vector<int> pairwise_base_;
  std::vector<int> order_;  // raw index -> simplex column
};

struct SupportSets {
  std::vector<std::vector<int>> sets;  // O*_v, sorted
  bool fixes(const SubsetToOne& p) const;
};

struct LpSolution {
  double value = 0.0;
  LiftedPoint point;
};

LpSolution solve_lp(const GraphicalModel& g, const OracleLimits& limits = {});

// Exact support of the optimal face: per coordinate, maximize mu_v(i) on
// the optimal face and keep labels whose maximum clears the threshold.
SupportSets support_sets(const GraphicalModel& g, const OracleLimits& limits = {},
                         const std::vector<int>* var_order = nullptr,
                         double threshold = 1e-7);

struct BruteImproving {
  bool improving = true;
  std::optional<Labeling> witness;  // labeling with p(x) != x and no decrease
};

// Exhaustive check of the strict improvement definition.
BruteImproving is_strictly_improving_brute(const GraphicalModel& f, const SubsetToOne& p,
                                           const OracleLimits& limits = {});

// Exact relaxed-improving membership via the verification LP support sets.
bool is_relaxed_improving_exact(const GraphicalModel& f, const SubsetToOne& p,
                                const OracleLimits& limits = {});

struct Algorithm1Result {
  SubsetToOne p;
  int iterations = 0;
};

// Iterative pruning with the exact LP: start from the everything-to-y
// substitution and repeatedly remove the optimal supports from Y.
Algorithm1Result algorithm1(const GraphicalModel& f, const Labeling& y,
                            const OracleLimits& limits = {});

// Enumeration oracle for maximum persistency; asserts the maximizer is the
// unique largest family.
SubsetToOne max_persistency_brute(const GraphicalModel& f, const Labeling& y,
                                  const OracleLimits& limits = {});

}  // namespace maxpers
