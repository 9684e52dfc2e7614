#include "uavtour/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace uavtour {

namespace {

/// Normalised per-arc costs of the scalarised objective.
struct ArcCosts {
  EdgeIndex edges;
  std::vector<double> time_cost;    // C^T_e
  std::vector<double> energy_cost;  // C^E_e
};

ArcCosts make_costs(const WeightMatrix& w, double lambda, const Extremes& ext) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("benders: lambda must lie in [0,1]");
  ArcCosts c;
  c.edges = EdgeIndex{w.k};
  const int ne = c.edges.count();
  c.time_cost.assign(ne, 0.0);
  c.energy_cost.assign(ne, 0.0);
  const double da = ext.aoi_max - ext.aoi_min;
  const double de = ext.energy_max - ext.energy_min;
  for (int e = 0; e < ne; ++e) {
    const auto [i, j] = c.edges.arc(e);
    c.time_cost[e] = da > 0.0 ? lambda * w.time(i, j) / (w.k * da) : 0.0;
    c.energy_cost[e] = de > 0.0 ? (1.0 - lambda) * w.energy(i, j) / de : 0.0;
  }
  return c;
}

/// Dual of the flow-pricing subproblem for an arc activation vector in
/// [0,1]^ne: integral activations during the main loop, fractional ones while
/// pooling cuts against the master's LP relaxation.
DualSolution solve_dual(const std::vector<double>& x, const WeightMatrix& w,
                        const ArcCosts& costs) {
  const int k = w.k;
  const EdgeIndex& ed = costs.edges;
  const int ne = ed.count();
  if (static_cast<int>(x.size()) != ne)
    throw std::invalid_argument("benders: arc selection size mismatch");

  // Variables: alpha_1..alpha_k (free), beta_1..beta_k (free), gamma_e >= 0.
  // Maximise sum alpha_i - sum K x_e gamma_e, handled as minimisation of its
  // negation.
  LpModel lp;
  for (int i = 0; i < k; ++i) lp.add_var(-1.0, -kInf, kInf);
  for (int i = 0; i < k; ++i) lp.add_var(0.0, -kInf, kInf);
  for (int e = 0; e < ne; ++e) lp.add_var(k * x[e], 0.0, kInf);
  const auto alpha_var = [&](int i) { return i - 1; };
  const auto beta_var = [&](int i) { return k + i - 1; };
  const auto gamma_var = [&](int e) { return 2 * k + e; };

  for (int e = 0; e < ne; ++e) {
    const auto [i, j] = ed.arc(e);
    std::vector<std::pair<int, double>> terms;
    if (i == 0) {
      terms = {{alpha_var(j), -1.0}, {beta_var(j), 1.0}, {gamma_var(e), -1.0}};
    } else if (j == 0) {
      terms = {{alpha_var(i), 1.0}, {gamma_var(e), -1.0}};
    } else {
      terms = {{alpha_var(i), 1.0}, {alpha_var(j), -1.0}, {gamma_var(e), -1.0}};
    }
    lp.add_row(Relation::LE, costs.time_cost[e], terms);
  }

  const LpOutcome out = solve_lp(lp);
  DualSolution sol;
  sol.alpha.assign(k, 0.0);
  sol.beta.assign(k, 0.0);
  sol.gamma.assign(ne, 0.0);
  if (out.status == LpStatus::Optimal) {
    for (int i = 1; i <= k; ++i) sol.alpha[i - 1] = out.x[alpha_var(i)];
    for (int i = 1; i <= k; ++i) sol.beta[i - 1] = out.x[beta_var(i)];
    for (int e = 0; e < ne; ++e) sol.gamma[e] = out.x[gamma_var(e)];
    sol.objective = -out.objective;  // back to the maximisation value g(x)
    return sol;
  }
  if (out.status == LpStatus::Unbounded) {
    sol.is_ray = true;
    double scale = 0.0;
    for (double v : out.ray) scale = std::max(scale, std::abs(v));
    for (int i = 1; i <= k; ++i) sol.alpha[i - 1] = out.ray[alpha_var(i)] / scale;
    for (int i = 1; i <= k; ++i) sol.beta[i - 1] = out.ray[beta_var(i)] / scale;
    for (int e = 0; e < ne; ++e) {
      double g = out.ray[gamma_var(e)] / scale;
      if (g < 0.0) {
        if (g < -1e-7) throw SolverError("benders: ray has negative gamma component");
        g = 0.0;
      }
      sol.gamma[e] = g;
    }
    double viol = 0.0;
    for (int i = 0; i < k; ++i) viol += sol.alpha[i];
    for (int e = 0; e < ne; ++e) viol -= k * x[e] * sol.gamma[e];
    if (!(viol > 1e-9))
      throw SolverError("benders: ray fails to cut off the arc selection that produced it");
    sol.objective = viol;
    return sol;
  }
  // alpha = beta = gamma = 0 is always feasible (time costs are >= 0).
  throw SolverError("benders: dual subproblem reported infeasible");
}

std::string format_trace(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  for (const auto& r : trace) {
    os << "  iter " << r.iter << ": lb=" << r.lb << " ub=" << r.ub << " cut="
       << (r.cut_kind == CutKind::Optimality ? "optimality" : "feasibility") << "\n";
    if (r.iter >= 50) {
      os << "  ... (" << trace.size() << " iterations total)\n";
      break;
    }
  }
  return os.str();
}

}  // namespace

DualSolution solve_dual_subproblem(const std::vector<char>& x, const WeightMatrix& w,
                                   double lambda, const Extremes& ext) {
  return solve_dual(std::vector<double>(x.begin(), x.end()), w, make_costs(w, lambda, ext));
}

BendersResult benders_solve(const WeightMatrix& w, const Extremes& ext, double lambda,
                            double tol, long iter_cap, bool lp_warmup) {
  const auto start = std::chrono::steady_clock::now();
  if (!(tol > 0.0)) throw std::invalid_argument("benders: tolerance must be > 0");
  const int k = w.k;
  const ArcCosts costs = make_costs(w, lambda, ext);
  const int ne = costs.edges.count();
  if (iter_cap <= 0) iter_cap = std::max(20L, 10L * k * k);

  // Master: arc binaries + the flow-cost epigraph variable theta (>= 0 is a
  // valid floor: every time cost is non-negative).
  MilpModel master;
  for (int e = 0; e < ne; ++e) master.lp.add_var(costs.energy_cost[e], 0.0, 1.0);
  const int theta = master.lp.add_var(1.0, 0.0, kInf);
  master.integer_vars.resize(ne);
  for (int e = 0; e < ne; ++e) master.integer_vars[e] = e;

  std::vector<std::pair<int, double>> balance;
  for (int i = 1; i <= k; ++i) {
    balance.emplace_back(costs.edges.of(0, i), 1.0);
    balance.emplace_back(costs.edges.of(i, 0), -1.0);
  }
  master.lp.add_row(Relation::EQ, 0.0, balance);
  for (int j = 1; j <= k; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i <= k; ++i)
      if (i != j) terms.emplace_back(costs.edges.of(i, j), 1.0);
    master.lp.add_row(Relation::EQ, 1.0, terms);
  }
  for (int j = 1; j <= k; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i <= k; ++i)
      if (i != j) terms.emplace_back(costs.edges.of(j, i), 1.0);
    master.lp.add_row(Relation::EQ, 1.0, terms);
  }

  // Static floor for theta. Each sensor's age contribution spans from its
  // own collection to the depot return, so it is at least the selected exit
  // arc's time plus the shortest completion from that arc's head (the direct
  // return, by the triangle inequality — hover times only ever lengthen a
  // detour). Summed over sensors this is linear in x:
  //   theta >= sum_e x_e * (C^T_e + [head(e) is a sensor] * C^T_{head->0}).
  // The dual cuts below can never express a floor that grows with x (their
  // x coefficients are always <= 0), yet this is what lets the integer
  // masters prune: without it theta stays near zero on any selection the
  // cuts have not pinned down individually.
  {
    std::vector<std::pair<int, double>> floor_terms{{theta, 1.0}};
    for (int e = 0; e < ne; ++e) {
      const auto [i, j] = costs.edges.arc(e);
      if (i == 0) continue;
      double coef = costs.time_cost[e];
      if (j != 0) coef += costs.time_cost[costs.edges.of(j, 0)];
      if (coef != 0.0) floor_terms.emplace_back(e, -coef);
    }
    if (floor_terms.size() > 1) master.lp.add_row(Relation::GE, 0.0, floor_terms);
  }

  // Separates the dual cut at the master LP relaxation's optimum and appends
  // it when violated there. Cuts are valid for fractional selections too
  // (weak duality does not care whether x is integral), so this pools value-
  // function pieces at pure-LP prices. Purely an acceleration: any hiccup
  // just keeps the pool gathered so far.
  const auto separate_fractional = [&]() -> bool {
    LpOutcome rel;
    try {
      rel = solve_lp(master.lp);
    } catch (const SolverError&) {
      return false;
    }
    if (rel.status != LpStatus::Optimal) return false;
    std::vector<double> xf(ne);
    for (int e = 0; e < ne; ++e) xf[e] = std::clamp(rel.x[e], 0.0, 1.0);

    DualSolution dual;
    try {
      dual = solve_dual(xf, w, costs);
    } catch (const SolverError&) {
      return false;
    }
    double alpha_sum = 0.0;
    for (int i = 0; i < k; ++i) alpha_sum += dual.alpha[i];
    std::vector<std::pair<int, double>> terms;
    for (int e = 0; e < ne; ++e)
      if (dual.gamma[e] != 0.0) terms.emplace_back(e, k * dual.gamma[e]);
    if (dual.is_ray) {
      master.lp.add_row(Relation::GE, alpha_sum, terms);
      return true;
    }
    double cut_at_xf = alpha_sum;
    for (const auto& [e, coef] : terms) cut_at_xf -= coef * xf[e];
    if (rel.x[theta] < cut_at_xf - 1e-9 * (1.0 + std::abs(cut_at_xf))) {
      terms.emplace_back(theta, 1.0);
      master.lp.add_row(Relation::GE, alpha_sum, terms);
      return true;
    }
    return false;  // the relaxation optimum admits no violated cut
  };

  // Warm-up: run the cut loop against the master's LP relaxation before any
  // integer search, so the integral masters do not rediscover the bulk of
  // the flow-cost value function one branch-and-bound tree at a time.
  if (lp_warmup) {
    const long warmup_cap = std::max(200L, 40L * k);
    for (long round = 0; round < warmup_cap; ++round)
      if (!separate_fractional()) break;
  }

  BendersResult result;
  double best_ub = kInf;
  double best_theta = 0.0;
  std::vector<char> best_x;

  for (int iter = 1; iter <= iter_cap; ++iter) {
    // The incumbent selection stays feasible for every cut (weak duality),
    // so it warm-starts the master and prunes provably-worse subtrees.
    MilpOptions mopt;
    if (!best_x.empty()) {
      mopt.warm_start.assign(ne + 1, 0.0);
      for (int e = 0; e < ne; ++e) mopt.warm_start[e] = best_x[e];
      mopt.warm_start[theta] = best_theta;
    }
    const MilpOutcome msol = solve_milp(master, mopt);
    if (msol.status != MilpStatus::Optimal)
      throw SolverError("benders: master unexpectedly infeasible");
    const double lb = msol.objective;

    std::vector<char> x(ne, 0);
    std::vector<double> xd(ne, 0.0);
    double energy_part = 0.0;
    for (int e = 0; e < ne; ++e) {
      if (msol.x[e] > 0.5) {
        x[e] = 1;
        xd[e] = 1.0;
        energy_part += costs.energy_cost[e];
      }
    }

    const DualSolution dual = solve_dual(xd, w, costs);
    TraceRow row;
    row.iter = iter;
    row.lb = lb;
    row.master_obj = lb;

    std::vector<std::pair<int, double>> terms;
    double alpha_sum = 0.0;
    for (int i = 0; i < k; ++i) alpha_sum += dual.alpha[i];
    for (int e = 0; e < ne; ++e)
      if (dual.gamma[e] != 0.0) terms.emplace_back(e, k * dual.gamma[e]);

    if (dual.is_ray) {
      row.cut_kind = CutKind::Feasibility;
      row.subproblem_obj = kInf;
    } else {
      row.cut_kind = CutKind::Optimality;
      row.subproblem_obj = dual.objective;
      const double ub = energy_part + dual.objective;
      if (ub < best_ub) {
        best_ub = ub;
        best_theta = dual.objective;
        best_x = x;
      }
      terms.emplace_back(theta, 1.0);
    }
    row.ub = best_ub;
    result.trace.push_back(row);
    result.cuts.push_back(BendersCut{row.cut_kind, dual.alpha, dual.gamma});

    if (best_ub - lb <= tol) {
      const MultiTour tour = decode_arcs(
          [&] {
            std::vector<std::pair<int, int>> arcs;
            for (int e = 0; e < ne; ++e)
              if (best_x[e]) arcs.push_back(costs.edges.arc(e));
            return arcs;
          }(),
          k);
      const TourMetrics metrics = evaluate_tour(tour, w);

      // The converged upper bound must be reproducible from the decoded
      // tour's own metrics, priced at the scalarised arc costs.
      double rederived = 0.0;
      for (const auto& [arc, f] : metrics.flow)
        rederived += f * costs.time_cost[costs.edges.of(arc.first, arc.second)];
      for (int e = 0; e < ne; ++e)
        if (best_x[e]) rederived += costs.energy_cost[e];
      if (std::abs(rederived - best_ub) > 1e-6 * (1.0 + std::abs(best_ub)))
        throw SolverError("benders: decoded tour metrics disagree with bound");

      result.point.lambda = lambda;
      result.point.avg_aoi_s = metrics.avg_aoi_s;
      result.point.energy_j = metrics.energy_j;
      result.point.tour = tour;
      result.point.solver = "benders";
      result.point.iterations = iter;
      result.point.runtime_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      return result;
    }

    master.lp.add_row(Relation::GE, alpha_sum, terms);

    // A few fractional separation rounds between integral masters: they pool
    // additional value-function pieces at LP prices, raising the next
    // master's bound far more cheaply than its branch and bound would.
    if (lp_warmup)
      for (int round = 0; round < 4; ++round)
        if (!separate_fractional()) break;
  }

  throw SolverError("benders: no convergence within " + std::to_string(iter_cap) +
                    " iterations\n" + format_trace(result.trace));
}

BendersResult benders_solve(const Instance& inst, double lambda, double tol, long iter_cap,
                            bool lp_warmup) {
  const WeightMatrix w = build_edge_weights(inst);
  return benders_solve(w, compute_extremes(w), lambda, tol, iter_cap, lp_warmup);
}

}  // namespace uavtour
