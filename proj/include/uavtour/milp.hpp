#pragma once

#include <vector>

#include "uavtour/lp.hpp"

namespace uavtour {

/// Mixed-integer program: the LP plus a list of variables required integral.
struct MilpModel {
  LpModel lp;
  std::vector<int> integer_vars;
};

struct MilpOptions {
  double int_tol{1e-6};    ///< how far from an integer still counts as integral
  double gap_tol{1e-9};    ///< prune when node bound >= incumbent - gap_tol
  bool audit{false};       ///< record the LP bound of every pruned node
  long node_limit{-1};     ///< throw SolverError beyond this many solved nodes
  /// Optional feasible point (one value per variable) seeding the incumbent,
  /// so subtrees that provably cannot beat it prune immediately. The solve
  /// still proves optimality. Throws std::invalid_argument when the point
  /// violates a row, a bound, or integrality.
  std::vector<double> warm_start{};
};

enum class MilpStatus { Optimal, Infeasible };

struct MilpOutcome {
  MilpStatus status{MilpStatus::Optimal};
  double objective{0.0};
  std::vector<double> x;
  long nodes{0};  ///< LP relaxations solved
  /// When options.audit: LP bound of each node pruned by the incumbent.
  /// The final objective must not exceed any of them (plus tolerance).
  std::vector<double> pruned_bounds;
};

/// Branch and bound over a warm-started dual-simplex engine. Children are
/// evaluated immediately from the parent's basis under an incumbent cutoff,
/// branching uses learned pseudocosts (plain most-fractional until history
/// exists, lowest index on ties), the search plunges into the better child
/// and otherwise picks best-bound (oldest node on ties), and reduced costs
/// fix integer variables pinned at a bound. Deterministic: with several
/// optima the first incumbent found wins, so re-solving returns the
/// identical solution.
MilpOutcome solve_milp(const MilpModel& model, const MilpOptions& options = {});

}  // namespace uavtour
