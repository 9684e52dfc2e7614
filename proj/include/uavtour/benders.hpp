#pragma once

#include <vector>

#include "uavtour/formulation.hpp"

namespace uavtour {

/// Solution of the dual flow subproblem for a fixed arc selection: either an
/// extreme point (alpha, beta, gamma maximising sum alpha_i - sum K x_e gamma_e,
/// whose value equals the cheapest feasible flow cost) or an extreme ray
/// proving the arc selection admits no feasible flow (a depot-free cycle).
struct DualSolution {
  bool is_ray{false};
  std::vector<double> alpha;  ///< per sensor (alpha[i-1] for sensor i)
  std::vector<double> beta;   ///< per sensor, dual of the zero depot-out flow
  std::vector<double> gamma;  ///< per arc in EdgeIndex order, >= 0
  /// Extreme point: the subproblem value g(x). Extreme ray: the violation
  /// sum alpha - sum K x_e gamma_e > 0 at the generating x.
  double objective{0.0};
};

/// Solve the dual subproblem as an explicit LP (one row per arc):
///   -alpha_i + beta_i - gamma_0i <= C^T_0i
///    alpha_i           - gamma_i0 <= C^T_i0
///    alpha_i - alpha_j - gamma_ij <= C^T_ij
/// Rays are scaled to max-norm 1. `x` holds one 0/1 flag per arc in
/// EdgeIndex order.
DualSolution solve_dual_subproblem(const std::vector<char>& x, const WeightMatrix& w,
                                   double lambda, const Extremes& ext);

enum class CutKind { Optimality, Feasibility };

struct BendersCut {
  CutKind kind{CutKind::Optimality};
  std::vector<double> alpha;
  std::vector<double> gamma;
};

struct TraceRow {
  int iter{0};            ///< 1-based
  double lb{0.0};         ///< master objective (non-decreasing)
  double ub{0.0};         ///< best upper bound so far (+inf until a point cut)
  CutKind cut_kind{CutKind::Optimality};
  double master_obj{0.0};
  double subproblem_obj{0.0};  ///< g(x) for point cuts, +inf for ray cuts
};

struct BendersResult {
  ParetoPoint point;
  std::vector<TraceRow> trace;
  std::vector<BendersCut> cuts;
};

/// Delayed-cut decomposition: the master picks arcs (plus the flow-cost
/// epigraph variable theta), the dual subproblem prices the flows and
/// returns an optimality or feasibility cut until upper and lower bounds
/// meet within `tol`. Iteration cap: max(20, 10 k^2) when `iter_cap` <= 0;
/// exceeding it raises SolverError with the trace in the message.
///
/// With `lp_warmup` set (the default) the same cut loop first runs against
/// the master's LP relaxation — cuts are valid for fractional selections
/// too, so this pools most of the value function cheaply before any integer
/// search happens. Warm-up rounds are not iterations: `trace` and `cuts`
/// record only the integral loop, and the converged answer is identical
/// either way.
BendersResult benders_solve(const WeightMatrix& w, const Extremes& ext, double lambda,
                            double tol = 1e-6, long iter_cap = -1, bool lp_warmup = true);
BendersResult benders_solve(const Instance& inst, double lambda, double tol = 1e-6,
                            long iter_cap = -1, bool lp_warmup = true);

}  // namespace uavtour
