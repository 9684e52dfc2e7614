#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "uavtour/errors.hpp"

namespace uavtour {

enum class Relation { LE, EQ, GE };

constexpr double kInf = std::numeric_limits<double>::infinity();

/// A linear program, min c'x  s.t.  row_i x {<=,=,>=} rhs_i,  lo <= x <= hi.
/// Rows are stored dense; models here are small and dense anyway.
struct LpModel {
  int num_vars{0};
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> relations;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  /// Appends a variable, returns its index.
  int add_var(double cost, double lo, double hi);

  /// Appends a row given its sparse terms (indices must be existing vars).
  void add_row(Relation rel, double rhs_value,
               const std::vector<std::pair<int, double>>& terms);

  /// Throws std::invalid_argument on mismatched dimensions, non-finite
  /// coefficients, or crossed bounds.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status{LpStatus::Optimal};
  double objective{0.0};

  // Populated when Optimal:
  std::vector<double> x;              ///< primal values, one per variable
  std::vector<double> row_duals;      ///< y, one per row (sign: min convention)
  std::vector<double> reduced_costs;  ///< d_j = c_j - y'A_j

  // Populated when Unbounded: a feasible improving direction r with
  // c'r < 0 and A r honouring every row relation homogeneously.
  std::vector<double> ray;

  int iterations{0};
};

/// Two-phase bounded-variable revised simplex. Deterministic: Dantzig
/// pricing with lowest-index tie-breaks, switching to Bland's rule after a
/// long degenerate stall so cycling cannot occur.
LpOutcome solve_lp(const LpModel& model);

/// Basis snapshot for restarting related solves (branch-and-bound nodes).
/// Opaque bookkeeping; `usable()` says whether a restart may begin here.
struct LpBasis {
  std::vector<int> rows;           ///< row -> simplex column
  std::vector<std::uint8_t> cols;  ///< per-column at-bound/basic tag
  std::uint64_t id{0};             ///< engine bookkeeping
  bool usable() const { return !rows.empty(); }
};

/// Result of a warm restart. When `cutoff_hit` the solve stopped as soon as
/// the objective — every dual-simplex step yields a valid lower bound on
/// this LP — exceeded the caller's cutoff; only `bound` is meaningful then.
struct LpWarmOutcome {
  bool cutoff_hit{false};
  double bound{0.0};  ///< valid lower bound on the LP optimum
  LpOutcome out;      ///< fully populated when the solve ran to completion
};

/// Reusable simplex for a sequence of solves over one model whose variable
/// bounds change between calls (the model is held by reference and its
/// current bounds are re-read on every call; rows must not change).
/// `solve` is the plain two-phase method; `warm` restarts dual-feasibly
/// from an earlier basis after bound changes — bound tightening never
/// disturbs reduced costs — detecting node infeasibility without a phase 1
/// and honouring an objective cutoff. Passing `from == nullptr` continues
/// from whatever basis the engine currently holds (valid right after a
/// previous solve on this engine), avoiding any refactorisation.
class LpEngine {
 public:
  explicit LpEngine(const LpModel& model);
  ~LpEngine();
  LpEngine(const LpEngine&) = delete;
  LpEngine& operator=(const LpEngine&) = delete;

  /// Two-phase solve honouring the model's current bounds; snapshots the
  /// final basis when `basis_out` is given (left unusable when the basis
  /// cannot seed restarts). Falls back to the conservative pivoting mode
  /// on numerical failure, like solve_lp.
  LpOutcome solve(LpBasis* basis_out);

  /// Warm restart from `from` (or the engine's current basis when null).
  /// Throws SolverError when the restart breaks down numerically; callers
  /// fall back to `solve`.
  LpWarmOutcome warm(const LpBasis* from, double cutoff, LpBasis* basis_out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uavtour
