#include "maxpers/verification.hpp"

#include <algorithm>
#include <limits>

namespace maxpers {

GraphicalModel verification_costs(const GraphicalModel& f, const SubsetToOne& p) {
  GraphicalModel pf = pullback(p, f);
  GraphicalModel g(f.labels());
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i)
      g.unary_table(v)[i] = f.unary(v, i) - pf.unary(v, i);
  for (int e = 0; e < f.num_edges(); ++e) {
    g.add_edge(f.edge(e).u, f.edge(e).v);
    for (int i = 0; i < f.num_labels(f.edge(e).u); ++i)
      for (int j = 0; j < f.num_labels(f.edge(e).v); ++j)
        g.set_pairwise(e, i, j, f.pairwise(e, i, j) - pf.pairwise(e, i, j));
  }
  g.set_constant(0.0);
  if (f.integer_costs()) g.set_integer_costs(true);
  return g;
}

ReducedCosts reduce(const GraphicalModel& f, const SubsetToOne& p) {
  require(p.labels() == f.labels(), "substitution shape mismatch");
  ReducedCosts r;
  r.p_ = p;
  const Labeling& y = p.y();

  GraphicalModel bar(f.labels());
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i)
      bar.unary_table(v)[i] = p.in_Y(v, i) ? f.unary(v, i) - f.unary(v, y[v]) : 0.0;

  r.delta_u_.resize(f.num_edges());
  r.delta_v_.resize(f.num_edges());
  r.rep_cost_.resize(f.num_edges());
  r.movable_block_.resize(f.num_edges());
  for (int e = 0; e < f.num_edges(); ++e) {
    int u = f.edge(e).u, v = f.edge(e).v;
    int ku = f.num_labels(u), kv = f.num_labels(v);
    bar.add_edge(u, v);
    r.rep_cost_[e] = f.pairwise(e, y[u], y[v]);

    // The immovable set always contains y, so these minima are never empty.
    std::vector<double>& du = r.delta_u_[e];
    std::vector<double>& dv = r.delta_v_[e];
    du.assign(ku, 0.0);
    dv.assign(kv, 0.0);
    for (int i = 0; i < ku; ++i) {
      if (!p.in_Y(u, i)) continue;
      double m = std::numeric_limits<double>::infinity();
      for (int j = 0; j < kv; ++j)
        if (!p.in_Y(v, j)) m = std::min(m, f.pairwise(e, i, j) - f.pairwise(e, y[u], j));
      du[i] = m;
    }
    for (int j = 0; j < kv; ++j) {
      if (!p.in_Y(v, j)) continue;
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < ku; ++i)
        if (!p.in_Y(u, i)) m = std::min(m, f.pairwise(e, i, j) - f.pairwise(e, i, y[v]));
      dv[j] = m;
    }

    for (int i = 0; i < ku; ++i)
      for (int j = 0; j < kv; ++j) {
        bool iu = p.in_Y(u, i), jv = p.in_Y(v, j);
        double value;
        if (!iu && !jv)
          value = 0.0;
        else if (!iu)
          value = dv[j];
        else if (!jv)
          value = du[i];
        else
          value = std::min(du[i] + dv[j],
                           f.pairwise(e, i, j) - r.rep_cost_[e]);
        bar.set_pairwise(e, i, j, value);
      }

    const auto& ymov = p.eliminated(u);
    const auto& jmov = p.eliminated(v);
    auto& block = r.movable_block_[e];
    block.reserve(ymov.size() * jmov.size());
    for (int i : ymov)
      for (int j : jmov) block.push_back(f.pairwise(e, i, j));
  }
  bar.set_constant(0.0);
  if (f.integer_costs()) bar.set_integer_costs(true);
  r.base_ = std::move(bar);
  return r;
}

GraphicalModel reduce_from_verification(const GraphicalModel& g, const SubsetToOne& p) {
  require(p.labels() == g.labels(), "substitution shape mismatch");
  GraphicalModel bar(g.labels());
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int i = 0; i < g.num_labels(v); ++i)
      bar.unary_table(v)[i] = g.unary(v, i);
  for (int e = 0; e < g.num_edges(); ++e) {
    int u = g.edge(e).u, v = g.edge(e).v;
    int ku = g.num_labels(u), kv = g.num_labels(v);
    bar.add_edge(u, v);
    std::vector<double> du(ku, 0.0), dv(kv, 0.0);
    for (int i = 0; i < ku; ++i) {
      if (!p.in_Y(u, i)) continue;
      double m = std::numeric_limits<double>::infinity();
      for (int j = 0; j < kv; ++j)
        if (!p.in_Y(v, j)) m = std::min(m, g.pairwise(e, i, j));
      du[i] = m;
    }
    for (int j = 0; j < kv; ++j) {
      if (!p.in_Y(v, j)) continue;
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < ku; ++i)
        if (!p.in_Y(u, i)) m = std::min(m, g.pairwise(e, i, j));
      dv[j] = m;
    }
    for (int i = 0; i < ku; ++i)
      for (int j = 0; j < kv; ++j) {
        bool iu = p.in_Y(u, i), jv = p.in_Y(v, j);
        double value;
        if (!iu && !jv)
          value = 0.0;
        else if (!iu)
          value = dv[j];
        else if (!jv)
          value = du[i];
        else
          value = std::min(du[i] + dv[j], g.pairwise(e, i, j));
        bar.set_pairwise(e, i, j, value);
      }
  }
  bar.set_constant(0.0);
  if (g.integer_costs()) bar.set_integer_costs(true);
  return bar;
}

Labeling Contraction::uncontract(const Labeling& xc) const {
  require(xc.size() == to_original.size(), "labeling length mismatch");
  Labeling x(xc.size());
  for (size_t v = 0; v < xc.size(); ++v) x[v] = to_original[v][xc[v]];
  return x;
}

Contraction contract(const ReducedCosts& r) {
  const GraphicalModel& bar = r.base();
  const SubsetToOne& p = r.substitution();
  Contraction c;
  std::vector<int> sizes(bar.num_nodes());
  c.to_original.resize(bar.num_nodes());
  c.to_contracted.resize(bar.num_nodes());
  for (int v = 0; v < bar.num_nodes(); ++v) {
    c.to_original[v].push_back(p.y()[v]);
    c.to_contracted[v].assign(bar.num_labels(v), 0);
    for (int i : p.eliminated(v)) {
      c.to_contracted[v][i] = static_cast<int>(c.to_original[v].size());
      c.to_original[v].push_back(i);
    }
    sizes[v] = static_cast<int>(c.to_original[v].size());
  }
  GraphicalModel m(sizes);
  for (int v = 0; v < bar.num_nodes(); ++v)
    for (int ci = 0; ci < sizes[v]; ++ci)
      m.unary_table(v)[ci] = bar.unary(v, c.to_original[v][ci]);
  for (int e = 0; e < bar.num_edges(); ++e) {
    int u = bar.edge(e).u, v = bar.edge(e).v;
    m.add_edge(u, v);
    for (int ci = 0; ci < sizes[u]; ++ci)
      for (int cj = 0; cj < sizes[v]; ++cj)
        m.set_pairwise(e, ci, cj,
                       bar.pairwise(e, c.to_original[u][ci], c.to_original[v][cj]));
  }
  m.set_constant(0.0);
  if (bar.integer_costs()) m.set_integer_costs(true);
  c.model = std::move(m);
  return c;
}

}  // namespace maxpers
