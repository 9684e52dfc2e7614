#pragma once

#include <vector>

#include "uavtour/formulation.hpp"
#include "uavtour/geometry.hpp"
#include "uavtour/model.hpp"
#include "uavtour/tours.hpp"

namespace uavtour {

/// Coverage disc of one sensor together with the points where the tour
/// enters and leaves it.  Entry lies on the segment from the previous tour
/// point to the centre, exit on the segment from the centre to the next
/// tour point; when the adjacent point is already inside the disc the
/// boundary point degenerates to that adjacent point and is flagged.
struct DiscGeometry {
  Point2 center;
  double radius_m = 0.0;
  Point2 entry;
  Point2 exit;
  bool entry_clamped = false;
  bool exit_clamped = false;
};

/// A discretised traversal of one coverage disc: a polyline from entry to
/// exit with strictly positive per-segment speeds, plus an optional dwell
/// (hover) at one waypoint.  The dwell carries the data-collection time that
/// the polyline alone cannot provide, priced at hover power; every moving
/// segment is priced at flight power.
struct DiscTraversal {
  std::vector<Point2> waypoints;          ///< first = entry, last = exit
  std::vector<double> segment_speeds_ms;  ///< one per consecutive pair, in (0, vmax]
  int dwell_index = 0;                    ///< waypoint at which the dwell happens
  double dwell_s = 0.0;                   ///< hover time at that waypoint
  double total_time_s = 0.0;              ///< flight time + dwell
  double energy_j = 0.0;
  double bits_collected = 0.0;
  bool budget_met = true;  ///< fits the fly-hover time/energy budget of its slot
};

/// Computes the disc entry and exit points for one sensor visit.
/// `prev` and `next` are the adjacent tour points (neighbouring sensor
/// centres, or the depot at cycle boundaries).
DiscGeometry entry_exit(const Point2& prev, const Point2& center, const Point2& next,
                        double d_th);

/// Locally optimises the traversal of one disc.
///
/// `f_weight` is the flow count on the inbound arc (number of sensors already
/// served in this cycle); the sensor's age accrues from disc entry, so the
/// traversal time is weighted by f_weight + 1 in the scalarised objective.
/// The search is seeded with the fly-hover-equivalent traversal (enter, fly
/// through the centre, dwell until the data volume is met, leave), so the
/// returned objective never exceeds the seed's.
///
/// `exit_budget_m` / `entry_budget_m` bound the leg distances whose flight
/// time the traversal may consume while still fitting inside the fly-hover
/// schedule; negative values derive them from the geometry itself.
DiscTraversal refine_disc(const DiscGeometry& geom, int f_weight, double data_bits,
                          const RadioParams& radio, const UavPowerModel& uav, double lambda,
                          const Extremes& ext, double exit_budget_m = -1.0,
                          double entry_budget_m = -1.0);

/// One refined sensor visit in tour order.
struct SensorTrajectory {
  int sn = 0;  ///< 1-based sensor id
  DiscGeometry geom;
  DiscTraversal traversal;
};

/// A whole tour after disc refinement, with the fly-hover reference metrics
/// it was derived from.
struct RefinedTour {
  double avg_aoi_s = 0.0;
  double energy_j = 0.0;
  double flyhover_avg_aoi_s = 0.0;
  double flyhover_energy_j = 0.0;
  std::vector<SensorTrajectory> visits;  ///< concatenated cycle order
};

/// Refines every disc of `tour` and re-derives the aggregate metrics with
/// inter-disc legs flown straight at cruise speed.  The age clock of each
/// sensor starts at its disc entry.
RefinedTour refine_tour(const MultiTour& tour, const Instance& inst, double lambda,
                        const Extremes& ext);

}  // namespace uavtour
