#include "maxpers/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxpers {

GraphicalModel::GraphicalModel(std::vector<int> num_labels)
    : num_labels_(std::move(num_labels)) {
  for (int k : num_labels_) require(k >= 1, "every node needs at least one label");
  unary_.resize(num_labels_.size());
  for (size_t v = 0; v < num_labels_.size(); ++v)
    unary_[v].assign(num_labels_[v], 0.0);
  adj_.resize(num_labels_.size());
}

int GraphicalModel::add_edge(int u, int v) {
  require(u >= 0 && u < num_nodes() && v >= 0 && v < num_nodes(),
          "edge endpoint out of range");
  require(u != v, "self-loops are not allowed");
  for (const EdgeRef& r : adj_[u])
    require(r.other != v, "duplicate edge (either orientation)");
  int e = num_edges();
  edges_.push_back({u, v});
  pairwise_.emplace_back(static_cast<size_t>(num_labels_[u]) * num_labels_[v], 0.0);
  adj_[u].push_back({e, v, true});
  adj_[v].push_back({e, u, false});
  return e;
}

bool GraphicalModel::all_costs_integral() const {
  auto integral = [](double x) { return std::rint(x) == x && std::isfinite(x); };
  if (!integral(constant_)) return false;
  for (const auto& t : unary_)
    for (double c : t)
      if (!integral(c)) return false;
  for (const auto& t : pairwise_)
    for (double c : t)
      if (!integral(c)) return false;
  return true;
}

void GraphicalModel::set_integer_costs(bool flag) {
  if (flag) require(all_costs_integral(), "integer mode requires exactly integral costs");
  integer_costs_ = flag;
}

void GraphicalModel::check_labeling(const Labeling& x) const {
  require(static_cast<int>(x.size()) == num_nodes(), "labeling length mismatch");
  for (int v = 0; v < num_nodes(); ++v)
    require(x[v] >= 0 && x[v] < num_labels_[v], "label out of range");
}

bool GraphicalModel::same_shape(const GraphicalModel& other) const {
  if (num_labels_ != other.num_labels_) return false;
  if (edges_.size() != other.edges_.size()) return false;
  for (size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].u != other.edges_[e].u || edges_[e].v != other.edges_[e].v)
      return false;
  return true;
}

Reparametrization::Reparametrization(const GraphicalModel& f) {
  msg_u_.resize(f.num_edges());
  msg_v_.resize(f.num_edges());
  for (int e = 0; e < f.num_edges(); ++e) {
    msg_u_[e].assign(f.num_labels(f.edge(e).u), 0.0);
    msg_v_[e].assign(f.num_labels(f.edge(e).v), 0.0);
  }
  node_offset_.assign(f.num_nodes(), 0.0);
}

bool Reparametrization::matches(const GraphicalModel& f) const {
  if (num_nodes() != f.num_nodes() || num_edges() != f.num_edges()) return false;
  for (int e = 0; e < f.num_edges(); ++e) {
    if (static_cast<int>(msg_u_[e].size()) != f.num_labels(f.edge(e).u)) return false;
    if (static_cast<int>(msg_v_[e].size()) != f.num_labels(f.edge(e).v)) return false;
  }
  return true;
}

double energy(const GraphicalModel& f, const Labeling& x) {
  f.check_labeling(x);
  double value = f.constant();
  for (int v = 0; v < f.num_nodes(); ++v) value += f.unary(v, x[v]);
  for (int e = 0; e < f.num_edges(); ++e)
    value += f.pairwise(e, x[f.edge(e).u], x[f.edge(e).v]);
  return value;
}

double reparametrized_unary(const GraphicalModel& f, const Reparametrization& phi,
                            int v, int i) {
  double value = f.unary(v, i);
  for (const EdgeRef& r : f.adjacent(v)) value += phi.at(r)[i];
  return value - phi.node_offset(v);
}

double reparametrized_pairwise(const GraphicalModel& f, const Reparametrization& phi,
                               int e, int i, int j) {
  return f.pairwise(e, i, j) - phi.at_u(e)[i] - phi.at_v(e)[j];
}

double reparametrized_constant(const GraphicalModel& f, const Reparametrization& phi) {
  double value = f.constant();
  for (int v = 0; v < f.num_nodes(); ++v) value += phi.node_offset(v);
  return value;
}

GraphicalModel reparametrized(const GraphicalModel& f, const Reparametrization& phi) {
  require(phi.matches(f), "reparametrization shape mismatch");
  GraphicalModel out(f.labels());
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i) {
      double value = f.unary(v, i) - phi.node_offset(v);
      out.unary_table(v)[i] = value;
    }
  for (int e = 0; e < f.num_edges(); ++e) {
    out.add_edge(f.edge(e).u, f.edge(e).v);
    for (int i = 0; i < f.num_labels(f.edge(e).u); ++i) {
      out.unary_table(f.edge(e).u)[i] += phi.at_u(e)[i];
      for (int j = 0; j < f.num_labels(f.edge(e).v); ++j)
        out.set_pairwise(e, i, j, reparametrized_pairwise(f, phi, e, i, j));
    }
    for (int j = 0; j < f.num_labels(f.edge(e).v); ++j)
      out.unary_table(f.edge(e).v)[j] += phi.at_v(e)[j];
  }
  out.set_constant(reparametrized_constant(f, phi));
  return out;
}

DualBound dual_lower_bound(const GraphicalModel& f, const Reparametrization& phi,
                           double tol) {
  require(phi.matches(f), "reparametrization shape mismatch");
  DualBound r;
  r.value = reparametrized_constant(f, phi);
  r.feasible = true;
  r.normalized = true;
  for (int v = 0; v < f.num_nodes(); ++v) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < f.num_labels(v); ++i)
      m = std::min(m, reparametrized_unary(f, phi, v, i));
    if (m < -tol) r.feasible = false;
    if (std::abs(m) > tol) r.normalized = false;
  }
  for (int e = 0; e < f.num_edges(); ++e) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < f.num_labels(f.edge(e).u); ++i)
      for (int j = 0; j < f.num_labels(f.edge(e).v); ++j)
        m = std::min(m, reparametrized_pairwise(f, phi, e, i, j));
    if (m < -tol) r.feasible = false;
    if (std::abs(m) > tol) r.normalized = false;
  }
  return r;
}

LiftedPoint zero_lifted(const GraphicalModel& f) {
  LiftedPoint mu;
  mu.unary.resize(f.num_nodes());
  for (int v = 0; v < f.num_nodes(); ++v) mu.unary[v].assign(f.num_labels(v), 0.0);
  mu.pairwise.resize(f.num_edges());
  for (int e = 0; e < f.num_edges(); ++e)
    mu.pairwise[e].assign(
        static_cast<size_t>(f.num_labels(f.edge(e).u)) * f.num_labels(f.edge(e).v),
        0.0);
  return mu;
}

LiftedPoint lift(const GraphicalModel& f, const Labeling& x) {
  f.check_labeling(x);
  LiftedPoint mu = zero_lifted(f);
  mu.constant = 1.0;
  for (int v = 0; v < f.num_nodes(); ++v) mu.unary[v][x[v]] = 1.0;
  for (int e = 0; e < f.num_edges(); ++e) {
    int cols = f.num_labels(f.edge(e).v);
    mu.pairwise[e][static_cast<size_t>(x[f.edge(e).u]) * cols + x[f.edge(e).v]] = 1.0;
  }
  return mu;
}

double dot(const GraphicalModel& f, const LiftedPoint& mu) {
  double value = f.constant() * mu.constant;
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i) value += f.unary(v, i) * mu.unary[v][i];
  for (int e = 0; e < f.num_edges(); ++e) {
    const auto& t = f.pairwise_table(e);
    for (size_t k = 0; k < t.size(); ++k) value += t[k] * mu.pairwise[e][k];
  }
  return value;
}

std::pair<double, Labeling> brute_force_min(const GraphicalModel& f, double max_count) {
  double best = std::numeric_limits<double>::infinity();
  Labeling best_x;
  for_each_labeling(
      f,
      [&](const Labeling& x) {
        double e = energy(f, x);
        if (e < best) {
          best = e;
          best_x = x;
        }
      },
      max_count);
  return {best, best_x};
}

}  // namespace maxpers
