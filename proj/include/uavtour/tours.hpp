#pragma once

#include <map>
#include <utility>
#include <vector>

#include "uavtour/errors.hpp"
#include "uavtour/model.hpp"

namespace uavtour {

/// An ordered multi-return tour: each cycle is the sequence of sensor ids
/// (1-based) visited between a depot departure and the matching return.
/// Within-cycle order drives the ages; cycle order never affects the metrics
/// (every age is anchored at its own cycle's depot return), which is what
/// makes the canonical() reordering safe.
struct MultiTour {
  std::vector<std::vector<int>> cycles;

  /// Throws StructuralError unless the cycles partition {1..k} with no
  /// repeats, no empty cycle, and ids in range.
  void validate(int k) const;

  /// Same traversal, cycles reordered so their minimum sensor ids increase.
  /// Within-cycle order is untouched (it encodes the traversal).
  MultiTour canonical() const;
};

bool operator==(const MultiTour& a, const MultiTour& b);
bool operator<(const MultiTour& a, const MultiTour& b);

/// Per-tour outcome of the exact fly-hover cost model.
struct TourMetrics {
  std::vector<double> aoi_s;  ///< age of information per sensor, aoi_s[i-1]
  double avg_aoi_s{0.0};
  double energy_j{0.0};
  /// Flow value on each traversed arc: 0 on the first arc of a cycle, then
  /// 1, 2, ... up to the arc returning to the depot.
  std::map<std::pair<int, int>, int> flow;
};

/// Ages via the backward recursion (age of sensor i = time from finishing its
/// upload until the end of its cycle), total energy as the sum of traversed
/// edge weights, and the arc flows that make avg AoI = sum f_ij T_ij / K.
TourMetrics evaluate_tour(const MultiTour& tour, const WeightMatrix& w);

/// Reconstruct the multi-tour from a set of selected arcs over {0..k}:
/// successor arcs are followed from each depot-out arc in ascending head
/// order. Validates unit in/out degree at sensors, equal depot degrees >= 1,
/// and that every cycle passes through the depot; the error message names
/// the offending vertex set otherwise.
MultiTour decode_arcs(const std::vector<std::pair<int, int>>& arcs, int k);

/// Scaling constants used when collapsing (avg AoI, energy) to one number.
struct Normalization {
  double aoi_min{0.0};
  double aoi_max{0.0};
  double energy_min{0.0};
  double energy_max{0.0};
};

struct OraclePoint {
  MultiTour tour;
  double avg_aoi_s{0.0};
  double energy_j{0.0};
};

/// Exhaustively computed Pareto data for one instance.
struct OracleResult {
  /// Non-dominated (avg AoI, energy) pairs, strictly increasing AoI and
  /// strictly decreasing energy, each with one witness tour.
  std::vector<OraclePoint> pareto;

  /// Exact minimiser of lambda*(A - aoi_min)/(aoi_max - aoi_min) +
  /// (1-lambda)*(E - energy_min)/(energy_max - energy_min) over *all* tours.
  /// Valid because for lambda in [0,1] some Pareto point always attains the
  /// overall minimum (weak dominance transfers to the weighted sum).
  const OraclePoint& scalarized_best(double lambda, const Normalization& n) const;

  /// The minimal scalarised value itself.
  double scalarized_min(double lambda, const Normalization& n) const;
};

/// Enumerate every multi-return tour (all permutations of {1..k} times all
/// contiguous splits into cycles, deduplicated by canonical cycle order) and
/// keep the non-dominated outcomes. Throws BoundError for k > 8.
OracleResult oracle_pareto(const WeightMatrix& w);
OracleResult oracle_pareto(const Instance& inst);

}  // namespace uavtour
