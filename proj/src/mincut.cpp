#include "maxpers/mincut.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace maxpers {

namespace {
constexpr double kResidualEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double BinaryEnergy::evaluate(const std::vector<int>& states) const {
  require(states.size() == nodes.size(), "state vector length mismatch");
  double value = constant;
  for (size_t k = 0; k < nodes.size(); ++k)
    value += states[k] ? unary1[k] : unary0[k];
  for (const PairTable& t : edges) value += t.t[states[t.a]][states[t.b]];
  return value;
}

BinaryEnergy restrict_to_move(const ReducedCosts& r, const Labeling& x) {
  const GraphicalModel& bar = r.base();
  const SubsetToOne& p = r.substitution();
  bar.check_labeling(x);
  const Labeling& y = p.y();

  BinaryEnergy b;
  std::vector<int> index(bar.num_nodes(), -1);
  for (int v = 0; v < bar.num_nodes(); ++v) {
    if (x[v] == y[v]) continue;
    index[v] = static_cast<int>(b.nodes.size());
    b.nodes.push_back({v, y[v], x[v]});
    b.unary0.push_back(bar.unary(v, y[v]));
    b.unary1.push_back(bar.unary(v, x[v]));
  }
  double sub_tol = bar.integer_costs() ? 0.0 : 1e-9;
  for (int e = 0; e < bar.num_edges(); ++e) {
    int u = bar.edge(e).u, v = bar.edge(e).v;
    int a = index[u], bidx = index[v];
    if (a < 0 && bidx < 0) {
      b.constant += bar.pairwise(e, y[u], y[v]);
    } else if (a < 0) {
      b.unary0[bidx] += bar.pairwise(e, y[u], y[v]);
      b.unary1[bidx] += bar.pairwise(e, y[u], x[v]);
    } else if (bidx < 0) {
      b.unary0[a] += bar.pairwise(e, y[u], y[v]);
      b.unary1[a] += bar.pairwise(e, x[u], y[v]);
    } else {
      BinaryEnergy::PairTable t;
      t.a = a;
      t.b = bidx;
      t.t[0][0] = bar.pairwise(e, y[u], y[v]);
      t.t[0][1] = bar.pairwise(e, y[u], x[v]);
      t.t[1][0] = bar.pairwise(e, x[u], y[v]);
      t.t[1][1] = bar.pairwise(e, x[u], x[v]);
      require(t.t[0][0] + t.t[1][1] <= t.t[0][1] + t.t[1][0] + sub_tol,
              "restricted table not submodular: reduction bug");
      b.edges.push_back(t);
    }
  }
  b.constant += bar.constant();
  return b;
}

FlowNetwork::FlowNetwork(int num_nodes) : n_(num_nodes), arcs_(num_nodes + 2) {}

void FlowNetwork::add_arc(int from, int to, double capacity) {
  require(capacity >= 0.0, "arc capacity must be nonnegative");
  Arc fwd{to, capacity, static_cast<int>(arcs_[to].size())};
  Arc bwd{from, 0.0, static_cast<int>(arcs_[from].size())};
  arcs_[from].push_back(fwd);
  arcs_[to].push_back(bwd);
}

bool FlowNetwork::bfs_levels() {
  level_.assign(n_ + 2, -1);
  std::deque<int> queue{source()};
  level_[source()] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const Arc& a : arcs_[v]) {
      if (a.cap > kResidualEps && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        queue.push_back(a.to);
      }
    }
  }
  return level_[sink()] >= 0;
}

double FlowNetwork::dfs_push(int v, double limit) {
  if (v == sink()) return limit;
  for (size_t& i = iter_[v]; i < arcs_[v].size(); ++i) {
    Arc& a = arcs_[v][i];
    if (a.cap > kResidualEps && level_[a.to] == level_[v] + 1) {
      double pushed = dfs_push(a.to, std::min(limit, a.cap));
      if (pushed > 0.0) {
        a.cap -= pushed;
        arcs_[a.to][a.rev].cap += pushed;
        return pushed;
      }
    }
  }
  return 0.0;
}

double FlowNetwork::max_flow() {
  double total = 0.0;
  while (bfs_levels()) {
    iter_.assign(n_ + 2, 0);
    while (true) {
      double pushed = dfs_push(source(), kInf);
      if (pushed <= 0.0) break;
      total += pushed;
    }
  }
  return total;
}

std::vector<char> FlowNetwork::source_reachable() const {
  std::vector<char> seen(n_ + 2, 0);
  std::deque<int> queue{source()};
  seen[source()] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (const Arc& a : arcs_[v])
      if (a.cap > kResidualEps && !seen[a.to]) {
        seen[a.to] = 1;
        queue.push_back(a.to);
      }
  }
  return seen;
}

std::vector<char> FlowNetwork::sink_coreachable() const {
  // Reverse residual reachability: arc v->w is traversable toward the sink
  // iff the stored residual capacity of v->w is positive.
  std::vector<char> seen(n_ + 2, 0);
  std::deque<int> queue{sink()};
  seen[sink()] = 1;
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (const Arc& back : arcs_[w]) {
      // back is w->v with reverse arc v->w; residual of v->w lives there.
      const Arc& fwd = arcs_[back.to][back.rev];
      if (fwd.cap > kResidualEps && !seen[back.to]) {
        seen[back.to] = 1;
        queue.push_back(back.to);
      }
    }
  }
  return seen;
}

namespace {

// Standard conversion of a submodular two-label energy into terminal and
// pairwise capacities; constant tracked so cut value + constant = energy.
// State 1 sits on the sink side.
struct BuiltNetwork {
  FlowNetwork net;
  double constant;
};

BuiltNetwork build_network(const BinaryEnergy& b) {
  int n = static_cast<int>(b.nodes.size());
  BuiltNetwork out{FlowNetwork(n), b.constant};
  std::vector<double> w(n, 0.0);  // net cost of taking state 1
  for (int k = 0; k < n; ++k) {
    out.constant += b.unary0[k];
    w[k] = b.unary1[k] - b.unary0[k];
  }
  for (const BinaryEnergy::PairTable& t : b.edges) {
    double a = t.t[0][0], bb = t.t[0][1], c = t.t[1][0], d = t.t[1][1];
    out.constant += a;
    w[t.a] += c - a;
    w[t.b] += d - c;
    double cap = bb + c - a - d;
    if (cap < 0.0) cap = 0.0;  // submodular up to float noise
    out.net.add_arc(t.a, t.b, cap);
  }
  for (int k = 0; k < n; ++k) {
    if (w[k] >= 0.0) {
      out.net.add_arc(out.net.source(), k, w[k]);
    } else {
      out.constant += w[k];
      out.net.add_arc(k, out.net.sink(), -w[k]);
    }
  }
  return out;
}

}  // namespace

MinCutSupport min_cut_support(const BinaryEnergy& b) {
  BuiltNetwork built = build_network(b);
  double flow = built.net.max_flow();
  MinCutSupport res;
  res.min_value = built.constant + flow;
  int n = static_cast<int>(b.nodes.size());
  res.achievable.resize(n);
  std::vector<char> smin = built.net.source_reachable();
  std::vector<char> tmin = built.net.sink_coreachable();
  for (int k = 0; k < n; ++k) {
    // Minimal source side = reachable set; maximal = complement of the
    // sink-coreachable set. State 0 is the source side.
    res.achievable[k][0] = !tmin[k];
    res.achievable[k][1] = !smin[k];
  }
  return res;
}

int pruning_cut(const ReducedCosts& r, SubsetToOne& p, const Labeling& x) {
  BinaryEnergy b = restrict_to_move(r, x);
  if (b.nodes.empty()) return 0;
  MinCutSupport support = min_cut_support(b);
  int removed = 0;
  for (size_t k = 0; k < b.nodes.size(); ++k) {
    if (!support.achievable[k][1]) continue;
    if (p.remove(b.nodes[k].original, b.nodes[k].label1)) ++removed;
  }
  return removed;
}

int single_node_prune(const GraphicalModel& f, SubsetToOne& p) {
  require(p.labels() == f.labels(), "substitution shape mismatch");
  const Labeling& y = p.y();
  int n = f.num_nodes();

  // delta[v][slot][i]: margin of label i at v against the immovable labels
  // across the slot-th incident edge. Kept in sync as Y shrinks.
  std::vector<std::vector<std::vector<double>>> delta(n);
  for (int v = 0; v < n; ++v) {
    delta[v].resize(f.adjacent(v).size());
    for (size_t s = 0; s < f.adjacent(v).size(); ++s) {
      const EdgeRef& ref = f.adjacent(v)[s];
      int u = ref.other;
      delta[v][s].assign(f.num_labels(v), 0.0);
      for (int i = 0; i < f.num_labels(v); ++i) {
        if (!p.in_Y(v, i)) continue;
        double m = kInf;
        for (int j = 0; j < f.num_labels(u); ++j) {
          if (p.in_Y(u, j)) continue;
          double fij = ref.is_u ? f.pairwise(ref.edge, i, j) : f.pairwise(ref.edge, j, i);
          double fyj = ref.is_u ? f.pairwise(ref.edge, y[v], j) : f.pairwise(ref.edge, j, y[v]);
          m = std::min(m, fij - fyj);
        }
        delta[v][s][i] = m;
      }
    }
  }

  double tol = f.integer_costs() ? 0.0 : 1e-9;
  int removed = 0;
  std::deque<int> worklist;
  std::vector<char> queued(n, 0);
  for (int v = 0; v < n; ++v) {
    worklist.push_back(v);
    queued[v] = 1;
  }
  while (!worklist.empty()) {
    int v = worklist.front();
    worklist.pop_front();
    queued[v] = 0;
    std::vector<int> drop;
    for (int i : p.eliminated(v)) {
      double value = f.unary(v, i) - f.unary(v, y[v]);
      for (size_t s = 0; s < f.adjacent(v).size(); ++s) value += delta[v][s][i];
      if (value <= tol) drop.push_back(i);
    }
    if (drop.empty()) continue;
    for (int i : drop) {
      p.remove(v, i);
      ++removed;
    }
    // Dropped labels became immovable at v, so each neighbor's margin across
    // this edge can only decrease; one min per surviving label suffices.
    for (size_t s = 0; s < f.adjacent(v).size(); ++s) {
      const EdgeRef& ref = f.adjacent(v)[s];
      int u = ref.other;
      size_t back = 0;
      while (f.adjacent(u)[back].edge != ref.edge) ++back;
      for (int i : drop) {
        for (int j : p.eliminated(u)) {
          double cand = ref.is_u
                            ? f.pairwise(ref.edge, i, j) - f.pairwise(ref.edge, i, y[u])
                            : f.pairwise(ref.edge, j, i) - f.pairwise(ref.edge, y[u], i);
          delta[u][back][j] = std::min(delta[u][back][j], cand);
        }
      }
      if (!queued[u]) {
        worklist.push_back(u);
        queued[u] = 1;
      }
    }
  }
  return removed;
}

}  // namespace maxpers
