#pragma once

#include <string>
#include <vector>

#include "maxpers/model.hpp"

namespace maxpers {

struct Measures {
  double label_fraction = 0.0;
  double log_fraction = 0.0;
};

// Subset-to-one substitution: in every node the labels in Y_v are replaced
// by the test label y_v, everything else is fixed. Y_v is kept sorted so
// pruning traces are reproducible run to run.
class SubsetToOne {
 public:
  SubsetToOne() = default;
  // Starts with empty Y (identity substitution).
  SubsetToOne(std::vector<int> num_labels, Labeling y);
  // Everything-to-y substitution: Y_v = X_v \ {y_v}.
  static SubsetToOne full(const std::vector<int>& num_labels, const Labeling& y);
  static SubsetToOne full(const GraphicalModel& f, const Labeling& y);

  int num_nodes() const { return static_cast<int>(num_labels_.size()); }
  int num_labels(int v) const { return num_labels_[v]; }
  const std::vector<int>& labels() const { return num_labels_; }
  const Labeling& y() const { return y_; }
  const std::vector<int>& eliminated(int v) const { return eliminated_[v]; }

  bool in_Y(int v, int i) const { return mask_[v][i] != 0; }
  int map_label(int v, int i) const { return mask_[v][i] ? y_[v] : i; }

  void add(int v, int i);
  // Removes i from Y_v if present; returns whether anything changed.
  bool remove(int v, int i);
  int total_eliminated() const;

  std::string to_json() const;
  static SubsetToOne from_json(const std::string& text, std::vector<int> num_labels);

  bool operator==(const SubsetToOne& other) const {
    return num_labels_ == other.num_labels_ && y_ == other.y_ &&
           eliminated_ == other.eliminated_;
  }

 private:
  std::vector<int> num_labels_;
  Labeling y_;
  std::vector<std::vector<int>> eliminated_;  // sorted Y_v
  std::vector<std::vector<char>> mask_;
};

Labeling apply(const SubsetToOne& p, const Labeling& x);

// Adjoint of the linear extension: (P^T f)_u(i) = f_u(p_u(i)) and likewise
// for pairwise tables; energy(pullback(p,f), x) = energy(f, apply(p,x)).
GraphicalModel pullback(const SubsetToOne& p, const GraphicalModel& f);

// Partial order for a fixed test labeling: q <= p iff Y^q_v is contained in
// Y^p_v everywhere. Throws if the test labelings differ.
bool leq(const SubsetToOne& q, const SubsetToOne& p);

Measures measures(const SubsetToOne& p);

}  // namespace maxpers
