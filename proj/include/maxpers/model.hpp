#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxpers {

using Labeling = std::vector<int>;

struct Edge {
  int u;
  int v;
};

// Incidence of one edge at a node; is_u tells which endpoint the node is.
struct EdgeRef {
  int edge;
  int other;
  bool is_u;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

// Pairwise graphical model with dense unary/pairwise cost tables and a
// constant term. Immutable once the tables are filled in; all solver
// operations take it by const reference and produce new values.
class GraphicalModel {
 public:
  GraphicalModel() = default;
  explicit GraphicalModel(std::vector<int> num_labels);

  // Adds edge uv with a zero table; rejects self-loops and duplicates in
  // either orientation. Returns the edge index.
  int add_edge(int u, int v);

  int num_nodes() const { return static_cast<int>(num_labels_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_labels(int v) const { return num_labels_[v]; }
  const std::vector<int>& labels() const { return num_labels_; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeRef>& adjacent(int v) const { return adj_[v]; }

  double unary(int v, int i) const { return unary_[v][i]; }
  std::vector<double>& unary_table(int v) { return unary_[v]; }
  const std::vector<double>& unary_table(int v) const { return unary_[v]; }

  double pairwise(int e, int i, int j) const {
    return pairwise_[e][static_cast<size_t>(i) * num_labels_[edges_[e].v] + j];
  }
  void set_pairwise(int e, int i, int j, double value) {
    pairwise_[e][static_cast<size_t>(i) * num_labels_[edges_[e].v] + j] = value;
  }
  std::vector<double>& pairwise_table(int e) { return pairwise_[e]; }
  const std::vector<double>& pairwise_table(int e) const { return pairwise_[e]; }

  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }

  bool integer_costs() const { return integer_costs_; }
  // Marks the model as integral; verifies every stored cost is an exact
  // integer when enabling.
  void set_integer_costs(bool flag);
  bool all_costs_integral() const;

  void check_labeling(const Labeling& x) const;

  bool same_shape(const GraphicalModel& other) const;

 private:
  std::vector<int> num_labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<double>> unary_;
  std::vector<std::vector<double>> pairwise_;
  std::vector<std::vector<EdgeRef>> adj_;
  double constant_ = 0.0;
  bool integer_costs_ = false;
};

// Dual point of the local polytope relaxation: one message vector per
// directed orientation of every edge plus a per-node offset.
class Reparametrization {
 public:
  Reparametrization() = default;
  explicit Reparametrization(const GraphicalModel& f);

  // phi_{uv}(i): message indexed by labels of the tail node u of edge e.
  std::vector<double>& at_u(int e) { return msg_u_[e]; }
  std::vector<double>& at_v(int e) { return msg_v_[e]; }
  const std::vector<double>& at_u(int e) const { return msg_u_[e]; }
  const std::vector<double>& at_v(int e) const { return msg_v_[e]; }
  // Message landing at the endpoint of e designated by ref.is_u.
  const std::vector<double>& at(const EdgeRef& r) const {
    return r.is_u ? msg_u_[r.edge] : msg_v_[r.edge];
  }
  std::vector<double>& at(const EdgeRef& r) {
    return r.is_u ? msg_u_[r.edge] : msg_v_[r.edge];
  }

  double node_offset(int v) const { return node_offset_[v]; }
  double& node_offset(int v) { return node_offset_[v]; }
  int num_nodes() const { return static_cast<int>(node_offset_.size()); }
  int num_edges() const { return static_cast<int>(msg_u_.size()); }

  bool matches(const GraphicalModel& f) const;

 private:
  std::vector<std::vector<double>> msg_u_;
  std::vector<std::vector<double>> msg_v_;
  std::vector<double> node_offset_;
};

// 1-hot lifting of a labeling; also the value type for LP solutions.
struct LiftedPoint {
  double constant = 0.0;
  std::vector<std::vector<double>> unary;
  std::vector<std::vector<double>> pairwise;
};

struct DualBound {
  double value = 0.0;
  bool feasible = false;
  bool normalized = false;
};

double energy(const GraphicalModel& f, const Labeling& x);

// f^phi component helpers.
double reparametrized_unary(const GraphicalModel& f, const Reparametrization& phi,
                            int v, int i);
double reparametrized_pairwise(const GraphicalModel& f, const Reparametrization& phi,
                               int e, int i, int j);
double reparametrized_constant(const GraphicalModel& f, const Reparametrization& phi);

// Materializes f^phi as a model; preserves the energy of every labeling.
GraphicalModel reparametrized(const GraphicalModel& f, const Reparametrization& phi);

// Reports f^phi_0 together with feasibility (all components >= -tol) and
// normalization (all per-node and per-edge minima zero within tol).
DualBound dual_lower_bound(const GraphicalModel& f, const Reparametrization& phi,
                           double tol = 1e-9);

LiftedPoint lift(const GraphicalModel& f, const Labeling& x);
LiftedPoint zero_lifted(const GraphicalModel& f);
double dot(const GraphicalModel& f, const LiftedPoint& mu);

// Enumerates all labelings of f (ascending lexicographic, node 0 slowest)
// and calls fn on each; throws if the label space exceeds max_count.
template <typename Fn>
void for_each_labeling(const GraphicalModel& f, Fn&& fn,
                       double max_count = 1e7) {
  double total = 1.0;
  for (int v = 0; v < f.num_nodes(); ++v) total *= f.num_labels(v);
  require(total <= max_count, "label space too large to enumerate");
  Labeling x(f.num_nodes(), 0);
  const int n = f.num_nodes();
  while (true) {
    fn(const_cast<const Labeling&>(x));
    int v = n - 1;
    while (v >= 0 && x[v] + 1 == f.num_labels(v)) {
      x[v] = 0;
      --v;
    }
    if (v < 0) break;
    ++x[v];
  }
}

// Exhaustive MAP oracle for test-scale instances.
std::pair<double, Labeling> brute_force_min(const GraphicalModel& f,
                                            double max_count = 1e7);

}  // namespace maxpers
