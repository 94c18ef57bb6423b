#include "maxpers/trws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxpers {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ChainDecomposition build_chains(const GraphicalModel& f, const std::vector<int>& order) {
  int n = f.num_nodes();
  require(static_cast<int>(order.size()) == n, "order must cover all nodes");
  ChainDecomposition dec;
  dec.order = order;
  dec.pos.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    require(order[k] >= 0 && order[k] < n && dec.pos[order[k]] < 0,
            "order must be a permutation");
    dec.pos[order[k]] = k;
  }

  struct DirectedEdge {
    int lo, hi, id;
  };
  std::vector<DirectedEdge> sorted;
  sorted.reserve(f.num_edges());
  for (int e = 0; e < f.num_edges(); ++e) {
    int u = f.edge(e).u, v = f.edge(e).v;
    if (dec.pos[u] < dec.pos[v])
      sorted.push_back({u, v, e});
    else
      sorted.push_back({v, u, e});
  }
  std::sort(sorted.begin(), sorted.end(), [&](const DirectedEdge& a, const DirectedEdge& b) {
    if (dec.pos[a.lo] != dec.pos[b.lo]) return dec.pos[a.lo] < dec.pos[b.lo];
    return dec.pos[a.hi] < dec.pos[b.hi];
  });

  std::vector<char> used(f.num_edges(), 0);
  // Finds an unused edge continuing from node t with the given stride in
  // order positions. At most one such node exists.
  auto continuation = [&](int t, int stride) -> int {
    for (const EdgeRef& r : f.adjacent(t))
      if (!used[r.edge] && dec.pos[r.other] - dec.pos[t] == stride) return r.edge;
    return -1;
  };

  dec.n_meet.assign(n, 0);
  dec.n_first.assign(n, 0);
  dec.n_last.assign(n, 0);
  for (const DirectedEdge& de : sorted) {
    if (used[de.id]) continue;
    used[de.id] = 1;
    std::vector<int> chain = {de.lo, de.hi};
    int stride = dec.pos[de.hi] - dec.pos[de.lo];
    // Same-stride extension keeps rows and columns separate on grids.
    for (int e = continuation(chain.back(), stride); e >= 0;
         e = continuation(chain.back(), stride)) {
      used[e] = 1;
      int t = chain.back();
      chain.push_back(f.edge(e).u == t ? f.edge(e).v : f.edge(e).u);
    }
    dec.n_first[chain.front()] += 1;
    dec.n_last[chain.back()] += 1;
    for (int u : chain) dec.n_meet[u] += 1;
    dec.chains.push_back(std::move(chain));
  }

  dec.isolated.assign(n, 0);
  for (int u = 0; u < n; ++u)
    if (dec.n_meet[u] == 0) {
      dec.isolated[u] = 1;
      dec.n_meet[u] = 1;
    }
  return dec;
}

std::vector<double> message_naive(const GraphicalModel& g, int e, bool from_u,
                                  const std::vector<double>& a, MessageStats* stats) {
  int ku = g.num_labels(g.edge(e).u), kv = g.num_labels(g.edge(e).v);
  int ka = from_u ? ku : kv, kb = from_u ? kv : ku;
  require(static_cast<int>(a.size()) == ka, "message input length mismatch");
  std::vector<double> out(kb, kInf);
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      double t = from_u ? g.pairwise(e, i, j) : g.pairwise(e, j, i);
      if (stats) ++stats->table_reads;
      out[j] = std::min(out[j], a[i] + t);
    }
  return out;
}

namespace {

// Shared reduced kernel. Label sets are described by the sending side's
// movable list (indices into a) and the receiving side's movable list;
// every other label is immovable and carries the constant a_imm.
std::vector<double> reduced_kernel(const std::vector<double>& a, double a_imm,
                                   const int* mov_a, int na, const int* mov_b, int nb,
                                   int kb, const double* delta_a, const double* delta_b,
                                   const double* f_block, bool transposed, double rep_cost,
                                   MessageStats* stats) {
  double m_rep = a_imm;
  for (int s = 0; s < na; ++s) {
    if (stats) ++stats->delta_reads;
    m_rep = std::min(m_rep, a[mov_a[s]] + delta_a[mov_a[s]]);
  }
  std::vector<double> out(kb, m_rep);
  if (stats && nb > 0) ++stats->f_reads;  // rep_cost
  for (int t = 0; t < nb; ++t) {
    double best = kInf;
    for (int s = 0; s < na; ++s) {
      double fv = transposed ? f_block[static_cast<size_t>(t) * na + s]
                             : f_block[static_cast<size_t>(s) * nb + t];
      if (stats) ++stats->f_reads;
      best = std::min(best, a[mov_a[s]] + fv);
    }
    if (stats) ++stats->delta_reads;
    out[mov_b[t]] = std::min(best - rep_cost, m_rep + delta_b[mov_b[t]]);
  }
  return out;
}

}  // namespace

std::vector<double> message_reduced(const ReducedCosts& r, int e, bool from_u,
                                    const std::vector<double>& a, MessageStats* stats) {
  const GraphicalModel& bar = r.base();
  const SubsetToOne& p = r.substitution();
  int u = bar.edge(e).u, v = bar.edge(e).v;
  int tail = from_u ? u : v, head = from_u ? v : u;
  require(static_cast<int>(a.size()) == bar.num_labels(tail),
          "message input length mismatch");
  // a must be constant on the immovable labels of the sending side.
  double a_imm = a[p.y()[tail]];
  for (int i = 0; i < bar.num_labels(tail); ++i)
    if (!p.in_Y(tail, i))
      require(std::abs(a[i] - a_imm) <= 1e-9 * (1.0 + std::abs(a_imm)),
              "reduced message requires constant input on immovable labels");

  const auto& mov_tail = p.eliminated(tail);
  const auto& mov_head = p.eliminated(head);
  const double* da = from_u ? r.delta_u(e).data() : r.delta_v(e).data();
  const double* db = from_u ? r.delta_v(e).data() : r.delta_u(e).data();
  return reduced_kernel(a, a_imm, mov_tail.data(), static_cast<int>(mov_tail.size()),
                        mov_head.data(), static_cast<int>(mov_head.size()),
                        bar.num_labels(head), da, db, r.movable_block(e).data(),
                        !from_u, r.rep_cost(e), stats);
}

std::vector<FastEdge> build_fast_edges(const ReducedCosts& r, const Contraction& c) {
  const GraphicalModel& bar = r.base();
  const SubsetToOne& p = r.substitution();
  std::vector<FastEdge> out(bar.num_edges());
  for (int e = 0; e < bar.num_edges(); ++e) {
    int u = bar.edge(e).u, v = bar.edge(e).v;
    FastEdge& fe = out[e];
    fe.rep_cost = r.rep_cost(e);
    fe.f_block = r.movable_block(e);
    int nu = static_cast<int>(p.eliminated(u).size());
    int nv = static_cast<int>(p.eliminated(v).size());
    fe.delta_u.assign(nu + 1, 0.0);
    fe.delta_v.assign(nv + 1, 0.0);
    for (int s = 0; s < nu; ++s)
      fe.delta_u[s + 1] = r.delta_u(e)[p.eliminated(u)[s]];
    for (int t = 0; t < nv; ++t)
      fe.delta_v[t + 1] = r.delta_v(e)[p.eliminated(v)[t]];
    (void)c;
  }
  return out;
}

std::vector<double> message_fast_contracted(const FastEdge& fe, bool from_u,
                                            const std::vector<double>& a,
                                            MessageStats* stats) {
  int ku = static_cast<int>(fe.delta_u.size());
  int kv = static_cast<int>(fe.delta_v.size());
  int ka = from_u ? ku : kv, kb = from_u ? kv : ku;
  require(static_cast<int>(a.size()) == ka, "message input length mismatch");
  // Contracted movable labels are 1..k-1; the representative is label 0.
  static thread_local std::vector<int> mov_a, mov_b;
  mov_a.resize(ka - 1);
  mov_b.resize(kb - 1);
  for (int i = 1; i < ka; ++i) mov_a[i - 1] = i;
  for (int j = 1; j < kb; ++j) mov_b[j - 1] = j;
  const double* da = from_u ? fe.delta_u.data() : fe.delta_v.data();
  const double* db = from_u ? fe.delta_v.data() : fe.delta_u.data();
  return reduced_kernel(a, a[0], mov_a.data(), ka - 1, mov_b.data(), kb - 1, kb, da, db,
                        fe.f_block.data(), !from_u, fe.rep_cost, stats);
}

namespace {

PassResult run_pass(const GraphicalModel& g, Reparametrization& phi,
                    const ChainDecomposition& dec, const PassOptions& opts,
                    bool forward) {
  require(phi.matches(g), "reparametrization shape mismatch");
  int n = g.num_nodes();
  std::vector<double> hat;
  for (int k = 0; k < n; ++k) {
    int u = forward ? dec.order[k] : dec.order[n - 1 - k];
    int pu = dec.pos[u];
    int ku = g.num_labels(u);
    hat.resize(ku);
    for (int i = 0; i < ku; ++i) hat[i] = reparametrized_unary(g, phi, u, i);
    double inv = 1.0 / dec.n_meet[u];
    for (const EdgeRef& r : g.adjacent(u)) {
      bool ahead = forward ? dec.pos[r.other] > pu : dec.pos[r.other] < pu;
      if (!ahead) continue;
      std::vector<double> a(ku);
      const std::vector<double>& into_u = phi.at(r);
      for (int i = 0; i < ku; ++i) a[i] = inv * hat[i] - into_u[i];
      std::vector<double> msg;
      if (opts.fast) {
        msg = message_fast_contracted((*opts.fast)[r.edge], r.is_u, a, opts.stats);
      } else {
        msg = message_naive(g, r.edge, r.is_u, a, opts.stats);
      }
      EdgeRef other{r.edge, u, !r.is_u};
      phi.at(other) = std::move(msg);
    }
  }

  PassResult res;
  res.lb = reparametrized_constant(g, phi);
  res.x.assign(n, 0);
  res.argmin.resize(n);
  for (int u = 0; u < n; ++u) {
    int ku = g.num_labels(u);
    double best = kInf;
    int best_i = 0;
    std::vector<double> vals(ku);
    for (int i = 0; i < ku; ++i) {
      vals[i] = reparametrized_unary(g, phi, u, i);
      if (vals[i] < best) {
        best = vals[i];
        best_i = i;
      }
    }
    res.x[u] = best_i;
    for (int i = 0; i < ku; ++i)
      if (vals[i] <= best + opts.activity_tol) res.argmin[u].push_back(i);
    double weight;
    if (dec.isolated[u])
      weight = 1.0;
    else
      weight = static_cast<double>(forward ? dec.n_last[u] : dec.n_first[u]) /
               dec.n_meet[u];
    res.lb += weight * best;
  }
  return res;
}

}  // namespace

PassResult forward_pass(const GraphicalModel& g, Reparametrization& phi,
                        const ChainDecomposition& dec, const PassOptions& opts) {
  return run_pass(g, phi, dec, opts, true);
}

PassResult backward_pass(const GraphicalModel& g, Reparametrization& phi,
                         const ChainDecomposition& dec, const PassOptions& opts) {
  return run_pass(g, phi, dec, opts, false);
}

Reparametrization dual_correct(const GraphicalModel& g, Reparametrization phi) {
  require(phi.matches(g), "reparametrization shape mismatch");
  for (int e = 0; e < g.num_edges(); ++e) {
    int ku = g.num_labels(g.edge(e).u), kv = g.num_labels(g.edge(e).v);
    double m_all = kInf;
    for (int i = 0; i < ku; ++i)
      for (int j = 0; j < kv; ++j)
        m_all = std::min(m_all, reparametrized_pairwise(g, phi, e, i, j));
    for (int i = 0; i < ku; ++i) phi.at_u(e)[i] += m_all;

    for (int i = 0; i < ku; ++i) {
      double m = kInf;
      for (int j = 0; j < kv; ++j)
        m = std::min(m, reparametrized_pairwise(g, phi, e, i, j));
      phi.at_u(e)[i] += m;
    }
    for (int j = 0; j < kv; ++j) {
      double m = kInf;
      for (int i = 0; i < ku; ++i)
        m = std::min(m, reparametrized_pairwise(g, phi, e, i, j));
      phi.at_v(e)[j] += m;
    }
  }
  for (int u = 0; u < g.num_nodes(); ++u) {
    double m = kInf;
    for (int i = 0; i < g.num_labels(u); ++i)
      m = std::min(m, reparametrized_unary(g, phi, u, i));
    phi.node_offset(u) += m;
  }
  return phi;
}

std::vector<std::vector<int>> active_labels(const GraphicalModel& g,
                                            const Reparametrization& phi, double tol) {
  std::vector<std::vector<int>> out(g.num_nodes());
  for (int u = 0; u < g.num_nodes(); ++u) {
    double best = kInf;
    std::vector<double> vals(g.num_labels(u));
    for (int i = 0; i < g.num_labels(u); ++i) {
      vals[i] = reparametrized_unary(g, phi, u, i);
      best = std::min(best, vals[i]);
    }
    for (int i = 0; i < g.num_labels(u); ++i)
      if (vals[i] <= best + tol) out[u].push_back(i);
  }
  return out;
}

Labeling conditioned_labeling(const GraphicalModel& g, const Reparametrization& phi,
                              const ChainDecomposition& dec) {
  Labeling x(g.num_nodes(), -1);
  for (int k = 0; k < g.num_nodes(); ++k) {
    int u = dec.order[k];
    double best = kInf;
    int best_i = 0;
    for (int i = 0; i < g.num_labels(u); ++i) {
      double value = reparametrized_unary(g, phi, u, i);
      for (const EdgeRef& r : g.adjacent(u)) {
        if (x[r.other] < 0) continue;
        value += r.is_u ? reparametrized_pairwise(g, phi, r.edge, i, x[r.other])
                        : reparametrized_pairwise(g, phi, r.edge, x[r.other], i);
      }
      if (value < best) {
        best = value;
        best_i = i;
      }
    }
    x[u] = best_i;
  }
  return x;
}

double diffusion_pass(const GraphicalModel& g, Reparametrization& phi) {
  double residual = 0.0;
  for (int u = 0; u < g.num_nodes(); ++u) {
    int deg = static_cast<int>(g.adjacent(u).size());
    if (deg == 0) continue;
    for (const EdgeRef& r : g.adjacent(u)) {
      for (int i = 0; i < g.num_labels(u); ++i) {
        double row_min = kInf;
        int e = r.edge;
        if (r.is_u) {
          for (int j = 0; j < g.num_labels(g.edge(e).v); ++j)
            row_min = std::min(row_min, reparametrized_pairwise(g, phi, e, i, j));
        } else {
          for (int j = 0; j < g.num_labels(g.edge(e).u); ++j)
            row_min = std::min(row_min, reparametrized_pairwise(g, phi, e, j, i));
        }
        double fu = reparametrized_unary(g, phi, u, i);
        double shift = (row_min - fu) / 2.0;
        residual = std::max(residual, std::abs(row_min - fu));
        phi.at(r)[i] += shift;  // raises f^phi_u(i), lowers the row
      }
    }
  }
  return residual;
}

MarginReport margin(const GraphicalModel& g, const Reparametrization& phi,
                    const Labeling& y) {
  g.check_labeling(y);
  MarginReport rep;
  rep.node_margins.resize(g.num_nodes());
  rep.problem_margin = kInf;
  for (int u = 0; u < g.num_nodes(); ++u) {
    double best = kInf;
    for (int i = 0; i < g.num_labels(u); ++i)
      best = std::min(best, reparametrized_unary(g, phi, u, i));
    rep.node_margins[u] = best - reparametrized_unary(g, phi, u, y[u]);
    rep.problem_margin = std::min(rep.problem_margin, rep.node_margins[u]);
  }
  if (g.num_nodes() == 0) rep.problem_margin = 0.0;
  return rep;
}

ArcConsistencyReport arc_consistency_check(const GraphicalModel& g,
                                           const Reparametrization& phi, double tol) {
  ArcConsistencyReport rep;
  std::vector<std::vector<char>> active(g.num_nodes());
  for (int u = 0; u < g.num_nodes(); ++u) {
    double best = kInf;
    std::vector<double> vals(g.num_labels(u));
    for (int i = 0; i < g.num_labels(u); ++i) {
      vals[i] = reparametrized_unary(g, phi, u, i);
      best = std::min(best, vals[i]);
    }
    active[u].assign(g.num_labels(u), 0);
    for (int i = 0; i < g.num_labels(u); ++i)
      if (vals[i] <= best + tol) active[u][i] = 1;
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    int u = g.edge(e).u, v = g.edge(e).v;
    int ku = g.num_labels(u), kv = g.num_labels(v);
    std::vector<double> vals(static_cast<size_t>(ku) * kv);
    double best = kInf;
    for (int i = 0; i < ku; ++i)
      for (int j = 0; j < kv; ++j) {
        vals[static_cast<size_t>(i) * kv + j] = reparametrized_pairwise(g, phi, e, i, j);
        best = std::min(best, vals[static_cast<size_t>(i) * kv + j]);
      }
    auto pair_active = [&](int i, int j) {
      return vals[static_cast<size_t>(i) * kv + j] <= best + tol;
    };
    for (int i = 0; i < ku; ++i)
      for (int j = 0; j < kv; ++j)
        if (pair_active(i, j) && (!active[u][i] || !active[v][j])) {
          rep.consistent = false;
          rep.violations.push_back(
              {ArcConsistencyViolation::pairwise_endpoint, e, u, i, j});
        }
    for (int i = 0; i < ku; ++i) {
      if (!active[u][i]) continue;
      bool found = false;
      for (int j = 0; j < kv && !found; ++j) found = pair_active(i, j);
      if (!found) {
        rep.consistent = false;
        rep.violations.push_back({ArcConsistencyViolation::missing_partner, e, u, i, -1});
      }
    }
    for (int j = 0; j < kv; ++j) {
      if (!active[v][j]) continue;
      bool found = false;
      for (int i = 0; i < ku && !found; ++i) found = pair_active(i, j);
      if (!found) {
        rep.consistent = false;
        rep.violations.push_back({ArcConsistencyViolation::missing_partner, e, v, j, -1});
      }
    }
  }
  return rep;
}

}  // namespace maxpers
