#include "uavtour/formulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <thread>

#include "uavtour/benders.hpp"

namespace uavtour {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

MultiTour held_karp_tsp(const WeightMatrix& w) {
  const int k = w.k;
  if (k < 1) throw BoundError("tsp: instance must have at least one sensor");
  if (k > 20) throw BoundError("tsp: exact dynamic programme is capped at 20 sensors");
  if (k == 1) return MultiTour{{{1}}};

  // dp[mask][j]: cheapest energy of a path depot -> ... -> sensor j+1
  // visiting exactly the sensors in mask (bit j set).
  const std::size_t full = (1ULL << k) - 1;
  std::vector<double> dp((full + 1) * k, kInf);
  std::vector<std::int8_t> parent((full + 1) * k, -1);
  for (int j = 0; j < k; ++j) dp[(1ULL << j) * k + j] = w.energy(0, j + 1);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (int j = 0; j < k; ++j) {
      if (!(mask >> j & 1)) continue;
      const double base = dp[mask * k + j];
      if (!std::isfinite(base)) continue;
      for (int t = 0; t < k; ++t) {
        if (mask >> t & 1) continue;
        const std::size_t next = mask | (1ULL << t);
        const double cand = base + w.energy(j + 1, t + 1);
        if (cand < dp[next * k + t]) {
          dp[next * k + t] = cand;
          parent[next * k + t] = static_cast<std::int8_t>(j);
        }
      }
    }
  }
  int last = 0;
  double best = kInf;
  for (int j = 0; j < k; ++j) {
    const double cand = dp[full * k + j] + w.energy(j + 1, 0);
    if (cand < best) {
      best = cand;
      last = j;
    }
  }
  std::vector<int> cycle(static_cast<std::size_t>(k));
  std::size_t mask = full;
  for (int pos = k - 1, j = last; pos >= 0; --pos) {
    cycle[pos] = j + 1;
    const int pj = parent[mask * k + j];
    mask ^= 1ULL << j;
    j = pj;
  }

  // The reversed cycle costs exactly the same energy (symmetric distances,
  // every node's hover term appears once either way); prefer the orientation
  // with lower average AoI, then the lexicographically smaller one.
  MultiTour fwd{{cycle}};
  std::reverse(cycle.begin(), cycle.end());
  MultiTour rev{{cycle}};
  const TourMetrics mf = evaluate_tour(fwd, w);
  const TourMetrics mr = evaluate_tour(rev, w);
  if (mr.avg_aoi_s < mf.avg_aoi_s - 1e-12) return rev;
  if (mf.avg_aoi_s < mr.avg_aoi_s - 1e-12) return fwd;
  return std::min(fwd, rev);
}

Extremes compute_extremes(const WeightMatrix& w) {
  Extremes ext;
  ext.k = w.k;
  ext.star_tour.cycles.clear();
  for (int i = 1; i <= w.k; ++i) ext.star_tour.cycles.push_back({i});
  ext.tsp_tour = held_karp_tsp(w);
  const TourMetrics star = evaluate_tour(ext.star_tour, w);
  const TourMetrics tsp = evaluate_tour(ext.tsp_tour, w);
  ext.aoi_min = star.avg_aoi_s;
  ext.energy_max = star.energy_j;
  ext.aoi_max = tsp.avg_aoi_s;
  ext.energy_min = tsp.energy_j;
  return ext;
}

std::vector<std::pair<int, int>> ScalarizedModel::selected_arcs(
    const std::vector<double>& x) const {
  std::vector<std::pair<int, int>> arcs;
  for (int e = 0; e < edges.count(); ++e)
    if (x[x_var(e)] > 0.5) arcs.push_back(edges.arc(e));
  return arcs;
}

namespace {

/// Rows shared by both arc models: unit in/out degree at every sensor, then
/// flow gain, zero depot-outbound flow, and arc capacity.
void add_common_rows(ScalarizedModel& sm, const WeightMatrix& w) {
  const EdgeIndex& ed = sm.edges;
  const int k = w.k;
  for (int j = 1; j <= k; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i <= k; ++i)
      if (i != j) terms.emplace_back(sm.x_var(ed.of(i, j)), 1.0);
    sm.milp.lp.add_row(Relation::EQ, 1.0, terms);
  }
  for (int j = 1; j <= k; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i <= k; ++i)
      if (i != j) terms.emplace_back(sm.x_var(ed.of(j, i)), 1.0);
    sm.milp.lp.add_row(Relation::EQ, 1.0, terms);
  }
  for (int i = 1; i <= k; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j <= k; ++j) {
      if (j == i) continue;
      terms.emplace_back(sm.y_var(ed.of(i, j)), 1.0);
      terms.emplace_back(sm.y_var(ed.of(j, i)), -1.0);
    }
    sm.milp.lp.add_row(Relation::EQ, 1.0, terms);
  }
  for (int i = 1; i <= k; ++i)
    sm.milp.lp.add_row(Relation::EQ, 0.0, {{sm.y_var(ed.of(0, i)), 1.0}});
  for (int e = 0; e < ed.count(); ++e) {
    sm.milp.lp.add_row(Relation::LE, 0.0,
                       {{sm.y_var(e), 1.0}, {sm.x_var(e), -static_cast<double>(k)}});
  }
}

ScalarizedModel make_arc_model(const WeightMatrix& w) {
  ScalarizedModel sm;
  sm.edges = EdgeIndex{w.k};
  const int ne = sm.edges.count();
  sm.time_cost.assign(ne, 0.0);
  sm.energy_cost.assign(ne, 0.0);
  for (int e = 0; e < ne; ++e) sm.milp.lp.add_var(0.0, 0.0, 1.0);   // x_e
  for (int e = 0; e < ne; ++e) sm.milp.lp.add_var(0.0, 0.0, kInf);  // y_e
  sm.milp.integer_vars.resize(ne);
  for (int e = 0; e < ne; ++e) sm.milp.integer_vars[e] = e;
  return sm;
}

}  // namespace

ScalarizedModel build_flow_milp(const WeightMatrix& w, double lambda, const Extremes& ext) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("scalarisation: lambda must lie in [0,1]");
  ScalarizedModel sm = make_arc_model(w);
  sm.lambda = lambda;

  const double da = ext.aoi_max - ext.aoi_min;
  const double de = ext.energy_max - ext.energy_min;
  for (int e = 0; e < sm.edges.count(); ++e) {
    const auto [i, j] = sm.edges.arc(e);
    sm.time_cost[e] = da > 0.0 ? lambda * w.time(i, j) / (w.k * da) : 0.0;
    sm.energy_cost[e] = de > 0.0 ? (1.0 - lambda) * w.energy(i, j) / de : 0.0;
    sm.milp.lp.objective[sm.x_var(e)] = sm.energy_cost[e];
    sm.milp.lp.objective[sm.y_var(e)] = sm.time_cost[e];
  }
  sm.objective_offset = -(da > 0.0 ? lambda * ext.aoi_min / da : 0.0) -
                        (de > 0.0 ? (1.0 - lambda) * ext.energy_min / de : 0.0);

  // Depot out-degree equals in-degree; its value (the cycle count) is free.
  std::vector<std::pair<int, double>> balance;
  for (int i = 1; i <= w.k; ++i) {
    balance.emplace_back(sm.x_var(sm.edges.of(0, i)), 1.0);
    balance.emplace_back(sm.x_var(sm.edges.of(i, 0)), -1.0);
  }
  sm.milp.lp.add_row(Relation::EQ, 0.0, balance);
  add_common_rows(sm, w);
  return sm;
}

ScalarizedModel hamiltonian_aoi_milp(const WeightMatrix& w) {
  ScalarizedModel sm = make_arc_model(w);
  sm.lambda = 1.0;
  for (int e = 0; e < sm.edges.count(); ++e) {
    const auto [i, j] = sm.edges.arc(e);
    sm.time_cost[e] = w.time(i, j) / w.k;
    sm.milp.lp.objective[sm.y_var(e)] = sm.time_cost[e];
  }

  // Exactly one departure and one return: a single cycle.
  std::vector<std::pair<int, double>> out_terms, in_terms;
  for (int i = 1; i <= w.k; ++i) {
    out_terms.emplace_back(sm.x_var(sm.edges.of(0, i)), 1.0);
    in_terms.emplace_back(sm.x_var(sm.edges.of(i, 0)), 1.0);
  }
  sm.milp.lp.add_row(Relation::EQ, 1.0, out_terms);
  sm.milp.lp.add_row(Relation::EQ, 1.0, in_terms);
  add_common_rows(sm, w);
  return sm;
}

namespace {

ParetoPoint decode_solution(const ScalarizedModel& sm, const WeightMatrix& w,
                          const MilpOutcome& sol, const char* solver_name) {
  const MultiTour tour = decode_arcs(sm.selected_arcs(sol.x), w.k);
  const TourMetrics metrics = evaluate_tour(tour, w);

  // The solver objective must be reproducible from the decoded tour's own
  // metrics: flow counts priced at the time costs plus selected arcs priced
  // at the energy costs.  A mismatch means decoding lost or invented an arc.
  double rederived = 0.0;
  for (const auto& [arc, f] : metrics.flow)
    rederived += f * sm.time_cost[sm.edges.of(arc.first, arc.second)];
  for (const auto& [i, j] : sm.selected_arcs(sol.x))
    rederived += sm.energy_cost[sm.edges.of(i, j)];
  if (std::abs(rederived - sol.objective) > 1e-6 * (1.0 + std::abs(sol.objective)))
    throw SolverError(std::string(solver_name) +
                      ": decoded tour metrics disagree with solver objective");

  ParetoPoint p;
  p.lambda = sm.lambda;
  p.avg_aoi_s = metrics.avg_aoi_s;
  p.energy_j = metrics.energy_j;
  p.tour = tour;
  p.solver = solver_name;
  p.iterations = sol.nodes;
  return p;
}

}  // namespace

ParetoPoint solve_scalarized_monolithic(const WeightMatrix& w, const Extremes& ext,
                                      double lambda) {
  const auto start = std::chrono::steady_clock::now();
  const ScalarizedModel sm = build_flow_milp(w, lambda, ext);
  const MilpOutcome sol = solve_milp(sm.milp);
  if (sol.status != MilpStatus::Optimal)
    throw SolverError("monolithic: arc model unexpectedly infeasible");
  ParetoPoint p = decode_solution(sm, w, sol, "monolithic");
  p.runtime_ms = elapsed_ms(start);
  return p;
}

ParetoPoint solve_hamiltonian(const WeightMatrix& w) {
  const auto start = std::chrono::steady_clock::now();
  const ScalarizedModel sm = hamiltonian_aoi_milp(w);
  const MilpOutcome sol = solve_milp(sm.milp);
  if (sol.status != MilpStatus::Optimal)
    throw SolverError("single-cycle model unexpectedly infeasible");
  ParetoPoint p = decode_solution(sm, w, sol, "hamiltonian");
  p.runtime_ms = elapsed_ms(start);
  return p;
}

std::vector<ParetoPoint> pareto_sweep(const Instance& inst, const std::vector<double>& lambdas,
                                    SolverChoice solver, double tol, int jobs,
                                    bool keep_duplicates) {
  if (lambdas.empty()) return {};
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0))
      throw std::invalid_argument("sweep: every lambda must lie in [0,1]");
  if (jobs < 1) throw std::invalid_argument("sweep: jobs must be >= 1");

  const WeightMatrix w = build_edge_weights(inst);

  // A single sensor admits exactly one tour, so every lambda maps to the
  // same point and no arc model needs solving.
  if (w.k == 1) {
    const auto start = std::chrono::steady_clock::now();
    ParetoPoint only;
    only.tour = MultiTour{{{1}}};
    const TourMetrics m = evaluate_tour(only.tour, w);
    only.avg_aoi_s = m.avg_aoi_s;
    only.energy_j = m.energy_j;
    only.solver = "direct";
    only.iterations = 0;
    only.runtime_ms = elapsed_ms(start);
    std::vector<ParetoPoint> points;
    for (double l : (keep_duplicates ? lambdas : std::vector<double>{lambdas.front()})) {
      only.lambda = l;
      points.push_back(only);
    }
    return points;
  }

  const Extremes ext = compute_extremes(w);

  std::vector<ParetoPoint> points(lambdas.size());
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto solve_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        points[i] = solver == SolverChoice::Monolithic
                        ? solve_scalarized_monolithic(w, ext, lambdas[i])
                        : benders_solve(w, ext, lambdas[i], tol).point;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error)
          first_error = std::make_exception_ptr(SolverError(
              "sweep at lambda=" + std::to_string(lambdas[i]) + ": " + e.what()));
        return;
      }
    }
  };

  const int workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(jobs), lambdas.size()));
  if (workers <= 1) {
    solve_range(0, lambdas.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (lambdas.size() + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(lambdas.size(), begin + chunk);
      if (begin < end) pool.emplace_back(solve_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (keep_duplicates) return points;
  std::vector<ParetoPoint> unique;
  std::vector<MultiTour> seen;
  for (auto& p : points) {
    const MultiTour canon = p.tour.canonical();
    if (std::find(seen.begin(), seen.end(), canon) != seen.end()) continue;
    seen.push_back(canon);
    unique.push_back(std::move(p));
  }
  return unique;
}

std::vector<double> lambda_grid(double a, double step, double b) {
  if (!(a >= 0.0 && b <= 1.0 && a <= b))
    throw std::invalid_argument("lambda grid: need 0 <= a <= b <= 1");
  if (!(step > 0.0)) throw std::invalid_argument("lambda grid: step must be > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    double v = a + i * step;
    if (v > b + 1e-9) break;
    if (std::abs(v - b) < 1e-9) v = b;
    grid.push_back(v);
    if (v == b) break;
  }
  return grid;
}

}  // namespace uavtour
