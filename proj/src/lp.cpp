#include "maxpers/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "maxpers/verification.hpp"

namespace maxpers {

namespace {
constexpr double kPivotEps = 1e-9;
}

void OracleLimits::check_lp(const GraphicalModel& f) const {
  if (f.num_nodes() > max_nodes)
    throw SizeLimitError("exact oracle limited to " + std::to_string(max_nodes) + " nodes");
  for (int v = 0; v < f.num_nodes(); ++v)
    if (f.num_labels(v) > max_labels)
      throw SizeLimitError("exact oracle limited to " + std::to_string(max_labels) + " labels");
}

DenseSimplex::DenseSimplex(int num_vars) : n_(num_vars), c_(num_vars, 0.0) {}

void DenseSimplex::set_objective(int var, double coeff) { c_[var] = coeff; }

int DenseSimplex::add_row(double rhs) {
  rows_.emplace_back(n_, 0.0);
  rhs_.push_back(rhs);
  return static_cast<int>(rows_.size()) - 1;
}

void DenseSimplex::set_coeff(int row, int var, double value) { rows_[row][var] = value; }

// Two-phase tableau simplex. Bland's rule everywhere: entering variable is
// the lowest-index improving column, the ratio test breaks ties by basis
// index. Terminates on every input.
DenseSimplex::Result DenseSimplex::solve() const {
  int m = static_cast<int>(rows_.size());
  int n = n_;
  int total = n + m;  // structural + artificial
  std::vector<std::vector<double>> t(m, std::vector<double>(total + 1, 0.0));
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    double sign = rhs_[r] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t[r][j] = sign * rows_[r][j];
    t[r][n + r] = 1.0;
    t[r][total] = sign * rhs_[r];
    basis[r] = n + r;
  }

  auto pivot = [&](int row, int col) {
    double inv = 1.0 / t[row][col];
    for (int j = 0; j <= total; ++j) t[row][j] *= inv;
    t[row][col] = 1.0;
    for (int r = 0; r < m; ++r) {
      if (r == row) continue;
      double factor = t[r][col];
      if (factor == 0.0) continue;
      for (int j = 0; j <= total; ++j) t[r][j] -= factor * t[row][j];
      t[r][col] = 0.0;
    }
  };

  // Runs Bland's simplex on the current tableau for objective obj (reduced
  // against the basis internally). allowed = number of usable columns.
  auto run = [&](const std::vector<double>& obj, int allowed) -> double {
    std::vector<double> z(allowed, 0.0);
    double zval = 0.0;
    for (int j = 0; j < allowed; ++j) z[j] = obj[j];
    for (int r = 0; r < m; ++r) {
      double cb = obj[basis[r]];
      if (cb == 0.0) continue;
      zval += cb * t[r][total];
      for (int j = 0; j < allowed; ++j) z[j] -= cb * t[r][j];
    }
    while (true) {
      int col = -1;
      for (int j = 0; j < allowed; ++j) {
        if (z[j] < -kPivotEps) {
          col = j;
          break;
        }
      }
      if (col < 0) break;
      int row = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        if (t[r][col] > kPivotEps) {
          double ratio = t[r][total] / t[r][col];
          if (ratio < best - kPivotEps ||
              (ratio < best + kPivotEps && (row < 0 || basis[r] < basis[row]))) {
            if (ratio < best) best = ratio;
            row = r;
          }
        }
      }
      require(row >= 0, "LP unbounded (unexpected for bounded polytopes)");
      double zc = z[col];
      pivot(row, col);
      basis[row] = col;
      // Update the reduced objective row.
      zval += zc * t[row][total];
      double factor = zc;
      for (int j = 0; j < allowed; ++j) z[j] -= factor * t[row][j];
      z[col] = 0.0;
    }
    return zval;
  };

  // Phase 1: drive artificials to zero.
  std::vector<double> phase1(total, 0.0);
  for (int j = n; j < total; ++j) phase1[j] = 1.0;
  double infeas = run(phase1, total);
  Result res;
  if (infeas > 1e-7) {
    res.feasible = false;
    return res;
  }
  // Pivot leftover artificial basics out on any nonzero structural column;
  // rows with none are redundant and harmless to keep.
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(t[r][j]) > kPivotEps) {
        pivot(r, j);
        basis[r] = j;
        break;
      }
    }
  }

  std::vector<double> phase2(total, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = c_[j];
  // Forbid re-entering artificials by pricing only structural columns.
  res.value = run(phase2, n);
  res.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) res.x[basis[r]] = t[r][total];
  return res;
}

LocalPolytopeLP::LocalPolytopeLP(const GraphicalModel& g,
                                 const std::vector<int>* var_order)
    : model_(&g) {
  unary_base_.resize(g.num_nodes());
  pairwise_base_.resize(g.num_edges());
  int next = 1;  // raw index 0 = mu_const
  for (int v = 0; v < g.num_nodes(); ++v) {
    unary_base_[v] = next;
    next += g.num_labels(v);
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    pairwise_base_[e] = next;
    next += g.num_labels(g.edge(e).u) * g.num_labels(g.edge(e).v);
  }
  num_vars_ = next;
  if (var_order) {
    require(static_cast<int>(var_order->size()) == num_vars_, "variable order size mismatch");
    order_ = *var_order;
  } else {
    order_.resize(num_vars_);
    std::iota(order_.begin(), order_.end(), 0);
  }
}

std::vector<double> LocalPolytopeLP::cost_coeffs() const {
  const GraphicalModel& g = *model_;
  std::vector<double> c(num_vars_, 0.0);
  c[var_const()] = g.constant();
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int i = 0; i < g.num_labels(v); ++i) c[var_unary(v, i)] = g.unary(v, i);
  for (int e = 0; e < g.num_edges(); ++e)
    for (int i = 0; i < g.num_labels(g.edge(e).u); ++i)
      for (int j = 0; j < g.num_labels(g.edge(e).v); ++j)
        c[var_pairwise(e, i, j)] = g.pairwise(e, i, j);
  return c;
}

DenseSimplex::Result LocalPolytopeLP::minimize(const std::vector<double>* objective,
                                               std::optional<double> anchor) const {
  const GraphicalModel& g = *model_;
  int extra = anchor ? 1 : 0;  // slack for <g,mu> <= anchor
  DenseSimplex lp(num_vars_ + extra);
  std::vector<double> obj = objective ? *objective : cost_coeffs();
  for (int j = 0; j < num_vars_; ++j) lp.set_objective(j, obj[j]);

  for (int e = 0; e < g.num_edges(); ++e) {
    int u = g.edge(e).u, v = g.edge(e).v;
    for (int i = 0; i < g.num_labels(u); ++i) {
      int row = lp.add_row(0.0);
      for (int j = 0; j < g.num_labels(v); ++j) lp.set_coeff(row, var_pairwise(e, i, j), 1.0);
      lp.set_coeff(row, var_unary(u, i), -1.0);
    }
    for (int j = 0; j < g.num_labels(v); ++j) {
      int row = lp.add_row(0.0);
      for (int i = 0; i < g.num_labels(u); ++i) lp.set_coeff(row, var_pairwise(e, i, j), 1.0);
      lp.set_coeff(row, var_unary(v, j), -1.0);
    }
  }
  for (int v = 0; v < g.num_nodes(); ++v) {
    int row = lp.add_row(0.0);
    for (int i = 0; i < g.num_labels(v); ++i) lp.set_coeff(row, var_unary(v, i), 1.0);
    lp.set_coeff(row, var_const(), -1.0);
  }
  {
    int row = lp.add_row(1.0);
    lp.set_coeff(row, var_const(), 1.0);
  }
  if (anchor) {
    std::vector<double> cost = cost_coeffs();
    int row = lp.add_row(*anchor);
    for (int j = 0; j < num_vars_; ++j)
      if (cost[j] != 0.0) lp.set_coeff(row, j, cost[j]);
    lp.set_coeff(row, num_vars_, 1.0);  // slack
  }
  DenseSimplex::Result r = lp.solve();
  if (extra) r.x.resize(num_vars_);
  return r;
}

LiftedPoint LocalPolytopeLP::to_lifted(const std::vector<double>& x) const {
  const GraphicalModel& g = *model_;
  LiftedPoint mu = zero_lifted(g);
  mu.constant = x[var_const()];
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int i = 0; i < g.num_labels(v); ++i) mu.unary[v][i] = x[var_unary(v, i)];
  for (int e = 0; e < g.num_edges(); ++e) {
    int cols = g.num_labels(g.edge(e).v);
    for (int i = 0; i < g.num_labels(g.edge(e).u); ++i)
      for (int j = 0; j < cols; ++j)
        mu.pairwise[e][static_cast<size_t>(i) * cols + j] = x[var_pairwise(e, i, j)];
  }
  return mu;
}

bool SupportSets::fixes(const SubsetToOne& p) const {
  for (size_t v = 0; v < sets.size(); ++v)
    for (int i : sets[v])
      if (p.in_Y(static_cast<int>(v), i)) return false;
  return true;
}

LpSolution solve_lp(const GraphicalModel& g, const OracleLimits& limits) {
  limits.check_lp(g);
  LocalPolytopeLP lp(g);
  DenseSimplex::Result r = lp.minimize();
  require(r.feasible, "local polytope LP must be feasible");
  LpSolution out;
  out.value = r.value;
  out.point = lp.to_lifted(r.x);
  return out;
}

namespace {

// Shared worker: optimal value once, then per-coordinate maxima on the
// optimal face. When `targets` is given, only those (v,i) pairs are probed
// and the scan stops at the first hit (used for the membership shortcut).
SupportSets support_sets_impl(const GraphicalModel& g, const OracleLimits& limits,
                              const std::vector<int>* var_order, double threshold,
                              const std::vector<std::pair<int, int>>* targets,
                              bool* any_hit) {
  limits.check_lp(g);
  LocalPolytopeLP lp(g, var_order);
  DenseSimplex::Result base = lp.minimize();
  require(base.feasible, "local polytope LP must be feasible");
  double anchor = base.value + 1e-9 * (1.0 + std::abs(base.value));

  SupportSets out;
  out.sets.resize(g.num_nodes());
  auto probe = [&](int v, int i) {
    std::vector<double> obj(lp.num_vars(), 0.0);
    obj[lp.var_unary(v, i)] = -1.0;  // maximize mu_v(i)
    DenseSimplex::Result r = lp.minimize(&obj, anchor);
    require(r.feasible, "optimal-face probe must stay feasible");
    return -r.value > threshold;
  };
  if (targets) {
    *any_hit = false;
    for (auto [v, i] : *targets) {
      if (probe(v, i)) {
        *any_hit = true;
        return out;
      }
    }
    return out;
  }
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int i = 0; i < g.num_labels(v); ++i)
      if (probe(v, i)) out.sets[v].push_back(i);
  return out;
}

}  // namespace

SupportSets support_sets(const GraphicalModel& g, const OracleLimits& limits,
                         const std::vector<int>* var_order, double threshold) {
  return support_sets_impl(g, limits, var_order, threshold, nullptr, nullptr);
}

BruteImproving is_strictly_improving_brute(const GraphicalModel& f, const SubsetToOne& p,
                                           const OracleLimits& limits) {
  BruteImproving out;
  for_each_labeling(
      f,
      [&](const Labeling& x) {
        if (!out.improving) return;
        Labeling px = apply(p, x);
        if (px == x) return;
        if (!(energy(f, px) < energy(f, x))) {
          out.improving = false;
          out.witness = x;
        }
      },
      limits.max_enumeration);
  return out;
}

bool is_relaxed_improving_exact(const GraphicalModel& f, const SubsetToOne& p,
                                const OracleLimits& limits) {
  GraphicalModel g = verification_costs(f, p);
  // The LP value is always <= 0 (y lifts to a zero-cost point). A clearly
  // negative value rules membership out without probing the face.
  LpSolution sol = solve_lp(g, limits);
  if (sol.value < -1e-7) return false;
  std::vector<std::pair<int, int>> targets;
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i : p.eliminated(v)) targets.emplace_back(v, i);
  bool hit = false;
  support_sets_impl(g, limits, nullptr, 1e-7, &targets, &hit);
  return !hit;
}

Algorithm1Result algorithm1(const GraphicalModel& f, const Labeling& y,
                            const OracleLimits& limits) {
  limits.check_lp(f);
  Algorithm1Result res{SubsetToOne::full(f, y), 0};
  while (true) {
    ++res.iterations;
    GraphicalModel g = verification_costs(f, res.p);
    SupportSets supports = support_sets(g, limits);
    if (supports.fixes(res.p)) return res;
    int removed = 0;
    for (int v = 0; v < f.num_nodes(); ++v)
      for (int i : supports.sets[v])
        if (res.p.remove(v, i)) ++removed;
    require(removed > 0, "pruning step must strictly shrink Y");
    if (res.p.total_eliminated() == 0) return res;  // identity substitution
  }
}

SubsetToOne max_persistency_brute(const GraphicalModel& f, const Labeling& y,
                                  const OracleLimits& limits) {
  f.check_labeling(y);
  std::vector<std::pair<int, int>> slots;  // movable (node, label) pairs
  for (int v = 0; v < f.num_nodes(); ++v)
    for (int i = 0; i < f.num_labels(v); ++i)
      if (i != y[v]) slots.emplace_back(v, i);
  int k = static_cast<int>(slots.size());
  require(std::pow(2.0, k) <= limits.max_families, "Y-set enumeration too large");

  int best = -1;
  std::vector<uint64_t> best_masks;
  for (uint64_t mask = 0; mask < (uint64_t{1} << k); ++mask) {
    SubsetToOne p(f.labels(), y);
    for (int b = 0; b < k; ++b)
      if (mask & (uint64_t{1} << b)) p.add(slots[b].first, slots[b].second);
    if (!is_relaxed_improving_exact(f, p, limits)) continue;
    int size = p.total_eliminated();
    if (size > best) {
      best = size;
      best_masks.assign(1, mask);
    } else if (size == best) {
      best_masks.push_back(mask);
    }
  }
  require(best >= 0, "identity substitution must always be improving");
  require(best_masks.size() == 1, "maximum persistency family must be unique");
  SubsetToOne p(f.labels(), y);
  for (int b = 0; b < k; ++b)
    if (best_masks[0] & (uint64_t{1} << b)) p.add(slots[b].first, slots[b].second);
  return p;
}

}  // namespace maxpers
