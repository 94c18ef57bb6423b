#pragma once

#include <vector>

#include "maxpers/model.hpp"
#include "maxpers/substitution.hpp"

namespace maxpers {

// g = (I - [p])^T f: energy(g, x) = energy(f, x) - energy(f, apply(p, x)).
GraphicalModel verification_costs(const GraphicalModel& f, const SubsetToOne& p);

// Partial submodular truncation of the verification costs, built straight
// from f. delta_uv(i) and delta_vu(j) are the movable-against-immovable
// margins; they vanish outside Y.
class ReducedCosts {
 public:
  ReducedCosts() = default;

  const GraphicalModel& base() const { return base_; }
  const SubsetToOne& substitution() const { return p_; }
  // Margin of label i at the tail (head) node of edge e against the
  // immovable labels on the other side.
  const std::vector<double>& delta_u(int e) const { return delta_u_[e]; }
  const std::vector<double>& delta_v(int e) const { return delta_v_[e]; }
  double rep_cost(int e) const { return rep_cost_[e]; }  // f_uv(y_u, y_v)
  // Original pairwise costs restricted to Y_u x Y_v (sorted label order,
  // row-major); this is all of f the fast message kernel ever touches.
  const std::vector<double>& movable_block(int e) const { return movable_block_[e]; }

  friend ReducedCosts reduce(const GraphicalModel& f, const SubsetToOne& p);

 private:
  GraphicalModel base_;
  SubsetToOne p_;
  std::vector<std::vector<double>> delta_u_;
  std::vector<std::vector<double>> delta_v_;
  std::vector<double> rep_cost_;
  std::vector<std::vector<double>> movable_block_;
};

ReducedCosts reduce(const GraphicalModel& f, const SubsetToOne& p);

// Cross-check path: applies the truncation to an explicitly built g.
// Produces exactly the same vector as reduce().
GraphicalModel reduce_from_verification(const GraphicalModel& g, const SubsetToOne& p);

// Contraction of the immovable labels into the single representative y_v.
// Contracted label 0 is the representative; labels 1..|Y_v| are the sorted
// eliminated labels.
struct Contraction {
  GraphicalModel model;
  // to_original[v][c] = original label of contracted label c.
  std::vector<std::vector<int>> to_original;
  // to_contracted[v][i] = contracted label of original label i (immovable
  // labels all map to 0).
  std::vector<std::vector<int>> to_contracted;

  Labeling uncontract(const Labeling& xc) const;
};

Contraction contract(const ReducedCosts& r);

}  // namespace maxpers
