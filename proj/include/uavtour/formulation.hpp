#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uavtour/milp.hpp"
#include "uavtour/model.hpp"
#include "uavtour/tours.hpp"

namespace uavtour {

/// Lexicographic numbering of the (k+1)*k ordered arcs over nodes {0..k}.
struct EdgeIndex {
  int k{0};

  int count() const { return (k + 1) * k; }

  int of(int i, int j) const { return i * k + (j > i ? j - 1 : j); }

  std::pair<int, int> arc(int e) const {
    const int i = e / k, r = e % k;
    return {i, r >= i ? r + 1 : r};
  }
};

/// Normalisation anchors for the bi-objective scalarisation, with the
/// extreme tours that realise them: the per-cycle star minimises avg AoI
/// (and maximises energy), the single min-energy cycle does the opposite.
struct Extremes {
  int k{0};
  double aoi_min{0.0};
  double aoi_max{0.0};
  double energy_min{0.0};
  double energy_max{0.0};
  MultiTour star_tour;
  MultiTour tsp_tour;

  Normalization norms() const { return {aoi_min, aoi_max, energy_min, energy_max}; }
};

/// Exact minimum-energy single cycle by Held-Karp dynamic programming.
/// Orientation ties (reversal has identical energy) resolve to the lower
/// avg AoI, then to the lexicographically smaller cycle.
/// Throws BoundError for k > 20.
MultiTour held_karp_tsp(const WeightMatrix& w);

Extremes compute_extremes(const WeightMatrix& w);

/// A scalarised arc model ready for the MILP solver: binaries x_e first,
/// then continuous flows y_e, both in EdgeIndex order.
struct ScalarizedModel {
  MilpModel milp;
  EdgeIndex edges;
  double lambda{0.0};
  std::vector<double> time_cost;    ///< per-arc coefficient on y
  std::vector<double> energy_cost;  ///< per-arc coefficient on x
  /// Raw optimum + offset = lambda*(A-Amin)/(Amax-Amin) + (1-lambda)*(E-Emin)/(Emax-Emin).
  double objective_offset{0.0};

  int x_var(int e) const { return e; }
  int y_var(int e) const { return edges.count() + e; }

  /// Arcs with x_e > 1/2 in a solution vector.
  std::vector<std::pair<int, int>> selected_arcs(const std::vector<double>& x) const;
};

/// Flow-based multi-tour model: minimise sum C^E_e x_e + sum C^T_e y_e with
///   C^T_e = lambda * T_e / (K (Amax - Amin)),  C^E_e = (1-lambda) * E_e / (Emax - Emin)
/// subject to depot out/in balance, unit sensor degrees, unit flow gain at
/// every sensor, zero depot-outbound flow, and y_e <= K x_e.
/// Throws std::invalid_argument unless lambda lies in [0,1].
ScalarizedModel build_flow_milp(const WeightMatrix& w, double lambda, const Extremes& ext);

/// Single-cycle variant: depot degrees pinned to one, objective the plain
/// average AoI (seconds), energy ignored. Used as the no-revisit baseline.
ScalarizedModel hamiltonian_aoi_milp(const WeightMatrix& w);

/// One solved point of the AoI/energy trade-off.
struct ParetoPoint {
  double lambda{0.0};
  double avg_aoi_s{0.0};
  double energy_j{0.0};
  MultiTour tour;
  std::string solver;
  long iterations{0};  ///< branch-and-bound nodes, or decomposition iterations
  double runtime_ms{0.0};
};

/// Solve the scalarised model whole (single MILP), decode, evaluate.
ParetoPoint solve_scalarized_monolithic(const WeightMatrix& w, const Extremes& ext,
                                      double lambda);

/// Best single-cycle (no-revisit) plan by average AoI.
ParetoPoint solve_hamiltonian(const WeightMatrix& w);

enum class SolverChoice { Monolithic, Benders };

/// Solve one scalarised point per lambda. Points whose tour already appeared
/// at a smaller lambda are dropped unless keep_duplicates. `jobs` > 1 solves
/// lambdas in parallel; results are deterministic either way.
std::vector<ParetoPoint> pareto_sweep(const Instance& inst, const std::vector<double>& lambdas,
                                    SolverChoice solver, double tol = 1e-6, int jobs = 1,
                                    bool keep_duplicates = false);

/// Grid a:step:b inclusive of both ends (the last point snaps to b when the
/// step lands within 1e-9 of it).
std::vector<double> lambda_grid(double a, double step, double b);

}  // namespace uavtour
