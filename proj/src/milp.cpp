#include "uavtour/milp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

namespace uavtour {

namespace {

using Overrides = std::vector<std::tuple<int, double, double>>;

/// Outcome of one LP evaluation inside the tree.
struct Eval {
  enum class Kind { Optimal, Infeasible, Unbounded, Cutoff } kind{Kind::Infeasible};
  double bound{kInf};  ///< LP objective (Optimal) or a valid lower bound (Cutoff)
  std::shared_ptr<const std::vector<double>> x;        // Optimal only
  std::shared_ptr<const std::vector<double>> redcost;  // Optimal only
  std::shared_ptr<const LpBasis> basis;                // Optimal only, may be null
};

struct Node {
  long id{0};
  double bound{-kInf};  ///< this node's own LP objective
  /// Absolute bound overrides accumulated from the root, applied in order.
  Overrides overrides;
  std::shared_ptr<const std::vector<double>> x;
  std::shared_ptr<const std::vector<double>> redcost;
  std::shared_ptr<const LpBasis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;                                // then oldest first
  }
};

}  // namespace

MilpOutcome solve_milp(const MilpModel& model, const MilpOptions& options) {
  model.lp.validate();
  for (int v : model.integer_vars)
    if (v < 0 || v >= model.lp.num_vars)
      throw std::invalid_argument("milp: integer variable index out of range");

  MilpOutcome out;
  LpModel scratch = model.lp;
  const std::vector<double> base_lo = scratch.lower;
  const std::vector<double> base_hi = scratch.upper;
  LpEngine engine(scratch);

  double best_obj = kInf;
  std::vector<double> best_x;
  bool have_incumbent = false;

  if (!options.warm_start.empty()) {
    const std::vector<double>& ws = options.warm_start;
    if (static_cast<int>(ws.size()) != model.lp.num_vars)
      throw std::invalid_argument("milp: warm start length mismatch");
    for (int j = 0; j < model.lp.num_vars; ++j) {
      const double tol = 1e-7 * (1.0 + std::abs(ws[j]));
      if (ws[j] < model.lp.lower[j] - tol || ws[j] > model.lp.upper[j] + tol)
        throw std::invalid_argument("milp: warm start violates a variable bound");
    }
    for (std::size_t i = 0; i < model.lp.rows.size(); ++i) {
      double lhs = 0.0;
      for (int j = 0; j < model.lp.num_vars; ++j) lhs += model.lp.rows[i][j] * ws[j];
      const double diff = lhs - model.lp.rhs[i];
      const double tol = 1e-6 * (1.0 + std::abs(model.lp.rhs[i]));
      const bool ok = (model.lp.relations[i] == Relation::LE && diff <= tol) ||
                      (model.lp.relations[i] == Relation::GE && diff >= -tol) ||
                      (model.lp.relations[i] == Relation::EQ && std::abs(diff) <= tol);
      if (!ok) throw std::invalid_argument("milp: warm start violates a row");
    }
    for (int v : model.integer_vars)
      if (std::abs(ws[v] - std::round(ws[v])) > options.int_tol)
        throw std::invalid_argument("milp: warm start violates integrality");
    best_obj = 0.0;
    for (int j = 0; j < model.lp.num_vars; ++j) best_obj += model.lp.objective[j] * ws[j];
    best_x = ws;
    have_incumbent = true;
  }

  // Pseudocosts: average LP-bound gain per unit of fractional distance,
  // learned from evaluated children. A variable without history borrows the
  // global average; with no history anywhere the score degenerates to plain
  // most-fractional branching.
  const int nv = model.lp.num_vars;
  std::vector<double> pc_sum_dn(nv, 0.0), pc_sum_up(nv, 0.0);
  std::vector<long> pc_cnt_dn(nv, 0), pc_cnt_up(nv, 0);
  double glob_sum_dn = 0.0, glob_sum_up = 0.0;
  long glob_cnt_dn = 0, glob_cnt_up = 0;

  const auto cutoff_now = [&] { return have_incumbent ? best_obj - options.gap_tol : kInf; };

  const auto evaluate = [&](const Overrides& ovr, const LpBasis* from, bool chain) -> Eval {
    for (auto [v, lo, hi] : ovr) {
      scratch.lower[v] = lo;
      scratch.upper[v] = hi;
    }
    Eval res;
    bool done = false;
    if (chain || (from != nullptr && from->usable())) {
      try {
        LpBasis snap;
        LpWarmOutcome wr = engine.warm(chain ? nullptr : from, cutoff_now(), &snap);
        if (wr.cutoff_hit) {
          res.kind = Eval::Kind::Cutoff;
          res.bound = wr.bound;
        } else if (wr.out.status == LpStatus::Infeasible) {
          res.kind = Eval::Kind::Infeasible;
        } else if (wr.out.status == LpStatus::Unbounded) {
          res.kind = Eval::Kind::Unbounded;
        } else {
          res.kind = Eval::Kind::Optimal;
          res.bound = wr.out.objective;
          res.x = std::make_shared<const std::vector<double>>(std::move(wr.out.x));
          res.redcost =
              std::make_shared<const std::vector<double>>(std::move(wr.out.reduced_costs));
          if (snap.usable()) res.basis = std::make_shared<const LpBasis>(std::move(snap));
        }
        done = true;
      } catch (const SolverError&) {
        done = false;  // numerical breakdown: fall back to a cold solve
      }
    }
    if (!done) {
      LpBasis snap;
      const LpOutcome o = engine.solve(&snap);
      if (o.status == LpStatus::Infeasible) {
        res.kind = Eval::Kind::Infeasible;
      } else if (o.status == LpStatus::Unbounded) {
        res.kind = Eval::Kind::Unbounded;
      } else {
        res.kind = Eval::Kind::Optimal;
        res.bound = o.objective;
        res.x = std::make_shared<const std::vector<double>>(o.x);
        res.redcost = std::make_shared<const std::vector<double>>(o.reduced_costs);
        if (snap.usable()) res.basis = std::make_shared<const LpBasis>(std::move(snap));
      }
    }
    for (auto [v, lo, hi] : ovr) {
      scratch.lower[v] = base_lo[v];
      scratch.upper[v] = base_hi[v];
    }
    ++out.nodes;
    if (options.node_limit > 0 && out.nodes > options.node_limit)
      throw SolverError("milp: node limit exceeded");
    return res;
  };

  const auto is_integral = [&](const std::vector<double>& x) {
    for (int v : model.integer_vars)
      if (std::abs(x[v] - std::round(x[v])) > options.int_tol) return false;
    return true;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;

  // Turn an evaluation into a prune record, an incumbent, or an open node.
  const auto accept = [&](Overrides&& ovr, const Eval& ev) -> std::optional<Node> {
    switch (ev.kind) {
      case Eval::Kind::Infeasible:
        return std::nullopt;
      case Eval::Kind::Unbounded:
        throw SolverError("milp: relaxation unbounded; integer objective has no floor");
      case Eval::Kind::Cutoff:
        if (options.audit) out.pruned_bounds.push_back(ev.bound);
        return std::nullopt;
      case Eval::Kind::Optimal:
        break;
    }
    if (have_incumbent && ev.bound >= best_obj - options.gap_tol) {
      if (options.audit) out.pruned_bounds.push_back(ev.bound);
      return std::nullopt;
    }
    if (is_integral(*ev.x)) {
      best_obj = ev.bound;
      best_x = *ev.x;
      have_incumbent = true;
      return std::nullopt;
    }
    Node n;
    n.id = next_id++;
    n.bound = ev.bound;
    n.overrides = std::move(ovr);
    n.x = ev.x;
    n.redcost = ev.redcost;
    n.basis = ev.basis;
    return n;
  };

  std::optional<Node> cur = accept({}, evaluate({}, nullptr, false));

  while (cur || !open.empty()) {
    Node node;
    if (cur) {
      node = std::move(*cur);
      cur.reset();
    } else {
      node = open.top();
      open.pop();
      if (have_incumbent && node.bound >= best_obj - options.gap_tol) {
        if (options.audit) out.pruned_bounds.push_back(node.bound);
        continue;
      }
    }

    // Branch variable: best pseudocost product score, lowest index on ties.
    const std::vector<double>& x = *node.x;
    int branch_var = -1;
    double best_score = -1.0, branch_frac = 0.0;
    for (int v : model.integer_vars) {
      const double val = x[v];
      if (std::abs(val - std::round(val)) <= options.int_tol) continue;
      const double f = val - std::floor(val);
      const double est_dn = pc_cnt_dn[v] > 0   ? pc_sum_dn[v] / pc_cnt_dn[v]
                            : glob_cnt_dn > 0 ? glob_sum_dn / glob_cnt_dn
                                              : 1.0;
      const double est_up = pc_cnt_up[v] > 0   ? pc_sum_up[v] / pc_cnt_up[v]
                            : glob_cnt_up > 0 ? glob_sum_up / glob_cnt_up
                                              : 1.0;
      const double score = std::max(est_dn * f, 1e-12) * std::max(est_up * (1.0 - f), 1e-12);
      if (score > best_score + 1e-15) {
        best_score = score;
        branch_var = v;
        branch_frac = f;
      }
    }
    if (branch_var < 0) {
      // Unreachable in practice: accept() never stores an integral node.
      if (!have_incumbent || node.bound < best_obj - options.gap_tol) {
        best_obj = node.bound;
        best_x = x;
        have_incumbent = true;
      }
      continue;
    }

    // Reduced-cost fixing: with an incumbent, an integer variable sitting at
    // a bound whose reduced cost exceeds the remaining headroom to the
    // cutoff cannot move in any improving solution of this subtree.
    Overrides fixed = node.overrides;
    if (have_incumbent && node.redcost) {
      const double margin = (best_obj - options.gap_tol) - node.bound;
      if (margin > 0.0) {
        const std::vector<double>& d = *node.redcost;
        for (int v : model.integer_vars) {
          if (v == branch_var) continue;
          double lo = base_lo[v], hi = base_hi[v];
          for (auto [ov, l, h] : node.overrides) {
            if (ov == v) {
              lo = l;
              hi = h;
            }
          }
          if (lo >= hi) continue;  // already fixed
          if (x[v] <= lo + options.int_tol && d[v] > margin + 1e-9)
            fixed.emplace_back(v, lo, lo);
          else if (x[v] >= hi - options.int_tol && -d[v] > margin + 1e-9)
            fixed.emplace_back(v, hi, hi);
        }
      }
    }

    const double down = std::floor(x[branch_var]);
    double eff_lo = base_lo[branch_var], eff_hi = base_hi[branch_var];
    for (auto [v, lo, hi] : node.overrides) {
      if (v == branch_var) {
        eff_lo = lo;
        eff_hi = hi;
      }
    }
    Overrides ovr_dn = fixed;
    ovr_dn.emplace_back(branch_var, eff_lo, down);
    Overrides ovr_up = fixed;
    ovr_up.emplace_back(branch_var, down + 1.0, eff_hi);

    // Both children are evaluated immediately: the down child warm-starts
    // from this node's basis, the up child continues from wherever the
    // engine now stands (the down child's final basis — a couple of bound
    // moves away, which the dual iterations absorb cheaply).
    const Eval ev_dn = evaluate(ovr_dn, node.basis.get(), false);
    const Eval ev_up = evaluate(ovr_up, node.basis.get(), true);

    const auto pc_note = [&](const Eval& ev, std::vector<double>& sum, std::vector<long>& cnt,
                             double& gsum, long& gcnt, double dist) {
      if (ev.kind != Eval::Kind::Optimal && ev.kind != Eval::Kind::Cutoff) return;
      const double gain = std::max(0.0, ev.bound - node.bound) / std::max(dist, 1e-9);
      sum[branch_var] += gain;
      ++cnt[branch_var];
      gsum += gain;
      ++gcnt;
    };
    pc_note(ev_dn, pc_sum_dn, pc_cnt_dn, glob_sum_dn, glob_cnt_dn, branch_frac);
    pc_note(ev_up, pc_sum_up, pc_cnt_up, glob_sum_up, glob_cnt_up, 1.0 - branch_frac);

    // Down first, so an equal-value integral up child is pruned rather than
    // replacing the incumbent (first solution found wins, deterministically).
    std::optional<Node> child_dn = accept(std::move(ovr_dn), ev_dn);
    std::optional<Node> child_up = accept(std::move(ovr_up), ev_up);

    // Plunge into the more promising child; the sibling waits in the heap.
    // Near-ties prefer the up child: it was evaluated last, so its basis is
    // the one the engine holds and plunging into it skips a refactorisation.
    if (child_dn && child_up) {
      const double tie = 1e-9 * (1.0 + std::abs(child_up->bound));
      if (child_dn->bound < child_up->bound - tie) {
        open.push(std::move(*child_up));
        cur = std::move(child_dn);
      } else {
        open.push(std::move(*child_dn));
        cur = std::move(child_up);
      }
    } else if (child_dn) {
      cur = std::move(child_dn);
    } else if (child_up) {
      cur = std::move(child_up);
    }
  }

  if (!have_incumbent) {
    out.status = MilpStatus::Infeasible;
    return out;
  }
  out.status = MilpStatus::Optimal;
  out.objective = best_obj;
  out.x = std::move(best_x);
  return out;
}

}  // namespace uavtour
