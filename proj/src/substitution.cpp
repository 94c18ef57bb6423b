#include "maxpers/substitution.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace maxpers {

SubsetToOne::SubsetToOne(std::vector<int> num_labels, Labeling y)
    : num_labels_(std::move(num_labels)), y_(std::move(y)) {
  require(y_.size() == num_labels_.size(), "test labeling length mismatch");
  for (size_t v = 0; v < y_.size(); ++v)
    require(y_[v] >= 0 && y_[v] < num_labels_[v], "test label out of range");
  eliminated_.resize(num_labels_.size());
  mask_.resize(num_labels_.size());
  for (size_t v = 0; v < num_labels_.size(); ++v)
    mask_[v].assign(num_labels_[v], 0);
}

SubsetToOne SubsetToOne::full(const std::vector<int>& num_labels, const Labeling& y) {
  SubsetToOne p(num_labels, y);
  for (int v = 0; v < p.num_nodes(); ++v)
    for (int i = 0; i < num_labels[v]; ++i)
      if (i != y[v]) p.add(v, i);
  return p;
}

SubsetToOne SubsetToOne::full(const GraphicalModel& f, const Labeling& y) {
  return full(f.labels(), y);
}

void SubsetToOne::add(int v, int i) {
  require(v >= 0 && v < num_nodes() && i >= 0 && i < num_labels_[v],
          "label out of range");
  require(i != y_[v], "test label cannot be eliminated");
  if (mask_[v][i]) return;
  mask_[v][i] = 1;
  auto& ys = eliminated_[v];
  ys.insert(std::lower_bound(ys.begin(), ys.end(), i), i);
}

bool SubsetToOne::remove(int v, int i) {
  if (i < 0 || i >= num_labels_[v] || !mask_[v][i]) return false;
  mask_[v][i] = 0;
  auto& ys = eliminated_[v];
  ys.erase(std::lower_bound(ys.begin(), ys.end(), i));
  return true;
}

int SubsetToOne::total_eliminated() const {
  int total = 0;
  for (const auto& ys : eliminated_) total += static_cast<int>(ys.size());
  return total;
}

std::string SubsetToOne::to_json() const {
  nlohmann::json j;
  j["y"] = y_;
  j["eliminated"] = eliminated_;
  return j.dump();
}

SubsetToOne SubsetToOne::from_json(const std::string& text, std::vector<int> num_labels) {
  nlohmann::json j = nlohmann::json::parse(text);
  SubsetToOne p(std::move(num_labels), j.at("y").get<Labeling>());
  auto elim = j.at("eliminated").get<std::vector<std::vector<int>>>();
  require(elim.size() == static_cast<size_t>(p.num_nodes()), "eliminated length mismatch");
  for (int v = 0; v < p.num_nodes(); ++v)
    for (int i : elim[v]) p.add(v, i);
  return p;
}

Labeling apply(const SubsetToOne& p, const Labeling& x) {
  require(x.size() == static_cast<size_t>(p.num_nodes()), "labeling length mismatch");
  Labeling out(x.size());
  for (int v = 0; v < p.num_nodes(); ++v) {
    require(x[v] >= 0 && x[v] < p.num_labels(v), "label out of range");
    out[v] = p.map_label(v, x[v]);
  }
  return out;
}

GraphicalModel pullback(const SubsetToOne& p, const GraphicalModel& f) {
  require(p.labels() == f.labels(), "substitution shape mismatch");
  GraphicalModel out(f.labels());
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i)
      out.unary_table(v)[i] = f.unary(v, p.map_label(v, i));
  for (int e = 0; e < f.num_edges(); ++e) {
    int u = f.edge(e).u, v = f.edge(e).v;
    out.add_edge(u, v);
    for (int i = 0; i < f.num_labels(u); ++i)
      for (int j = 0; j < f.num_labels(v); ++j)
        out.set_pairwise(e, i, j, f.pairwise(e, p.map_label(u, i), p.map_label(v, j)));
  }
  out.set_constant(f.constant());
  if (f.integer_costs()) out.set_integer_costs(true);
  return out;
}

bool leq(const SubsetToOne& q, const SubsetToOne& p) {
  require(q.labels() == p.labels(), "substitution shape mismatch");
  require(q.y() == p.y(), "substitutions must share the test labeling");
  for (int v = 0; v < q.num_nodes(); ++v)
    for (int i : q.eliminated(v))
      if (!p.in_Y(v, i)) return false;
  return true;
}

Measures measures(const SubsetToOne& p) {
  Measures m;
  long long elim = 0, movable = 0;
  double log_remaining = 0.0, log_total = 0.0;
  for (int v = 0; v < p.num_nodes(); ++v) {
    int k = p.num_labels(v);
    elim += static_cast<long long>(p.eliminated(v).size());
    movable += k - 1;
    if (k > 1) {
      log_remaining += std::log(static_cast<double>(k - static_cast<int>(p.eliminated(v).size())));
      log_total += std::log(static_cast<double>(k));
    }
  }
  // Nothing eliminable counts as trivially complete.
  m.label_fraction = movable == 0 ? 1.0 : static_cast<double>(elim) / movable;
  m.log_fraction = log_total == 0.0 ? 1.0 : 1.0 - log_remaining / log_total;
  return m;
}

}  // namespace maxpers
