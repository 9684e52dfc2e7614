#include "uavtour/trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace uavtour {

namespace {

constexpr int kWaypoints = 20;    // discretisation of one disc traversal
constexpr double kObjEps = 1e-12;  // minimum accepted improvement

/// Everything a per-disc evaluation needs, flattened out of the public types.
struct DiscContext {
  Point2 center;
  double radius = 0.0;
  const RadioParams* radio = nullptr;
  double flight_power = 0.0;
  double hover_power = 0.0;
  double cruise = 0.0;
  double vmax = 0.0;
  double data_bits = 0.0;
  double aoi_weight = 0.0;     // multiplies traversal time
  double energy_weight = 0.0;  // multiplies traversal energy
  double time_budget_s = 0.0;
  double energy_budget_j = 0.0;
};

struct Candidate {
  std::vector<Point2> w;
  std::vector<double> v;
  int dwell_index = 0;
  double dwell_s = 0.0;
  double time_s = 0.0;
  double energy_j = 0.0;
  double bits = 0.0;
  double obj = std::numeric_limits<double>::infinity();
};

/// Restores bits_collected == demand (dwelling at the best waypoint to cover
/// a deficit, speeding up the least productive segments to shed a surplus),
/// then refreshes the cached time/energy/objective.  Deterministic.
void repair_and_eval(Candidate& c, const DiscContext& ctx) {
  const int n = static_cast<int>(c.w.size());
  std::vector<double> rate(n);
  for (int i = 0; i < n; ++i)
    rate[i] = achievable_rate(*ctx.radio, dist(c.w[i], ctx.center));
  c.dwell_index = 0;
  for (int i = 1; i < n; ++i)
    if (rate[i] > rate[c.dwell_index]) c.dwell_index = i;

  // Trapezoidal rate integral over the moving segments.
  auto flight_bits = [&] {
    double bits = 0.0;
    for (int s = 0; s + 1 < n; ++s) {
      const double len = dist(c.w[s], c.w[s + 1]);
      if (len > 0.0) bits += 0.5 * (rate[s] + rate[s + 1]) * (len / c.v[s]);
    }
    return bits;
  };

  double bits = flight_bits();
  const double deficit = ctx.data_bits - bits;
  if (deficit > 0.0) {
    c.dwell_s = deficit / rate[c.dwell_index];
    bits += rate[c.dwell_index] * c.dwell_s;
  } else {
    c.dwell_s = 0.0;
    double surplus = -deficit;
    std::vector<int> order;
    for (int s = 0; s + 1 < n; ++s)
      if (dist(c.w[s], c.w[s + 1]) > 0.0 && c.v[s] < ctx.vmax) order.push_back(s);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double ra = rate[a] + rate[a + 1];
      const double rb = rate[b] + rate[b + 1];
      if (ra != rb) return ra < rb;
      return a < b;
    });
    for (int s : order) {
      if (surplus <= 0.0) break;
      const double len = dist(c.w[s], c.w[s + 1]);
      const double r = 0.5 * (rate[s] + rate[s + 1]);
      const double now = r * len / c.v[s];
      const double at_cap = r * len / ctx.vmax;
      if (now - at_cap <= surplus) {
        surplus -= now - at_cap;
        c.v[s] = ctx.vmax;
      } else {
        c.v[s] = r * len / (now - surplus);
        surplus = 0.0;
      }
    }
    bits = flight_bits();
  }

  double flight_time = 0.0;
  for (int s = 0; s + 1 < n; ++s) {
    const double len = dist(c.w[s], c.w[s + 1]);
    if (len > 0.0) flight_time += len / c.v[s];
  }
  c.bits = bits;
  c.time_s = flight_time + c.dwell_s;
  c.energy_j = ctx.flight_power * flight_time + ctx.hover_power * c.dwell_s;
  c.obj = ctx.aoi_weight * c.time_s + ctx.energy_weight * c.energy_j;
}

/// True when the traversal fits the fly-hover slot it replaces, which is the
/// per-disc certificate that the aggregate metrics cannot get worse.
bool within_budget(const Candidate& c, const DiscContext& ctx) {
  return c.time_s <= ctx.time_budget_s + 1e-9 * (1.0 + ctx.time_budget_s) &&
         c.energy_j <= ctx.energy_budget_j + 1e-9 * (1.0 + ctx.energy_budget_j);
}

Point2 clamp_to_disc(const Point2& p, const Point2& c, double r) {
  const double d = dist(p, c);
  if (d <= r) return p;
  const double s = r / d;
  return {c.x + (p.x - c.x) * s, c.y + (p.y - c.y) * s};
}

/// Evenly spaced waypoints along the straight chord entry -> exit.
std::vector<Point2> chord_shape(const DiscGeometry& g) {
  std::vector<Point2> pts(kWaypoints);
  for (int i = 0; i < kWaypoints; ++i)
    pts[i] = lerp(g.entry, g.exit, static_cast<double>(i) / (kWaypoints - 1));
  return pts;
}

/// Waypoints along entry -> centre -> exit with the centre landing exactly on
/// a waypoint, so a dwell there collects at the full centre rate.
std::vector<Point2> via_center_shape(const DiscGeometry& g) {
  constexpr int half = kWaypoints / 2;
  std::vector<Point2> pts;
  pts.reserve(kWaypoints);
  for (int i = 0; i < half; ++i)
    pts.push_back(lerp(g.entry, g.center, static_cast<double>(i) / (half - 1)));
  for (int i = 1; i <= half; ++i)
    pts.push_back(lerp(g.center, g.exit, static_cast<double>(i) / half));
  return pts;
}

/// Coordinate descent over interior waypoints and segment speeds with a
/// shrinking step; `guarded` restricts acceptance to budget-respecting moves.
void local_search(Candidate& cur, const DiscContext& ctx, bool guarded) {
  const int n = static_cast<int>(cur.w.size());
  const double min_step = 1e-3 * ctx.radius;
  double step = 0.2 * ctx.radius;
  int sweeps = 0;
  while (step >= min_step && sweeps < 400) {
    ++sweeps;
    bool improved = false;
    static constexpr double kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int i = 1; i + 1 < n; ++i) {
      for (const auto& d : kDirs) {
        Candidate cand = cur;
        cand.w[i] = clamp_to_disc({cur.w[i].x + step * d[0], cur.w[i].y + step * d[1]},
                                  ctx.center, ctx.radius);
        repair_and_eval(cand, ctx);
        if (guarded && !within_budget(cand, ctx)) continue;
        if (cand.obj < cur.obj - kObjEps) {
          cur = std::move(cand);
          improved = true;
        }
      }
    }
    for (int s = 0; s + 1 < n; ++s) {
      for (const double f : {1.3, 1.0 / 1.3}) {
        Candidate cand = cur;
        cand.v[s] = std::min(cur.v[s] * f, ctx.vmax);
        if (cand.v[s] == cur.v[s]) continue;
        repair_and_eval(cand, ctx);
        if (guarded && !within_budget(cand, ctx)) continue;
        if (cand.obj < cur.obj - kObjEps) {
          cur = std::move(cand);
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
}

}  // namespace

DiscGeometry entry_exit(const Point2& prev, const Point2& center, const Point2& next,
                        double d_th) {
  if (!(d_th > 0.0) || !std::isfinite(d_th))
    throw std::invalid_argument("disc geometry: coverage radius must be positive");
  DiscGeometry g;
  g.center = center;
  g.radius_m = d_th;
  const double dp = dist(prev, center);
  if (dp < d_th) {
    g.entry = prev;
    g.entry_clamped = true;
  } else {
    const double s = d_th / dp;
    g.entry = {center.x + (prev.x - center.x) * s, center.y + (prev.y - center.y) * s};
  }
  const double dn = dist(next, center);
  if (dn < d_th) {
    g.exit = next;
    g.exit_clamped = true;
  } else {
    const double s = d_th / dn;
    g.exit = {center.x + (next.x - center.x) * s, center.y + (next.y - center.y) * s};
  }
  return g;
}

DiscTraversal refine_disc(const DiscGeometry& geom, int f_weight, double data_bits,
                          const RadioParams& radio, const UavPowerModel& uav, double lambda,
                          const Extremes& ext, double exit_budget_m, double entry_budget_m) {
  radio.validate();
  uav.validate();
  if (!(geom.radius_m > 0.0) || !std::isfinite(geom.radius_m))
    throw std::invalid_argument("refine: disc radius must be positive");
  if (f_weight < 0) throw std::invalid_argument("refine: flow weight must be non-negative");
  if (!(data_bits >= 0.0)) throw std::invalid_argument("refine: data volume must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("refine: lambda must lie in [0,1]");
  if (ext.k < 1) throw std::invalid_argument("refine: normalisation extremes are empty");
  const double slack = geom.radius_m * (1.0 + 1e-9);
  if (dist(geom.entry, geom.center) > slack || dist(geom.exit, geom.center) > slack)
    throw std::invalid_argument("refine: entry/exit must lie on or inside the disc");

  DiscContext ctx;
  ctx.center = geom.center;
  ctx.radius = geom.radius_m;
  ctx.radio = &radio;
  ctx.flight_power = uav.flight_power_w;
  ctx.hover_power = uav.hover_power_w;
  ctx.cruise = uav.speed_ms;
  ctx.vmax = uav.max_speed_ms;
  ctx.data_bits = data_bits;

  // Fly-hover budget of this slot: the hover time plus the leg distances the
  // baseline flies outside the neighbouring gaps.  The entry leg only counts
  // for the sensors already aged, hence the f/(f+1) factor.
  const double hover_ref = hover_time_s(radio, data_bits);
  const double xb = exit_budget_m >= 0.0 ? exit_budget_m : dist(geom.center, geom.exit);
  const double nb = entry_budget_m >= 0.0 ? entry_budget_m : dist(geom.entry, geom.center);
  ctx.time_budget_s = hover_ref + (xb + nb * (f_weight / (f_weight + 1.0))) / ctx.cruise;
  ctx.energy_budget_j =
      uav.hover_power_w * hover_ref + uav.flight_power_w * (xb + nb) / ctx.cruise;

  const double seed_legs = dist(geom.entry, geom.center) + dist(geom.center, geom.exit);
  const double seed_time = seed_legs / ctx.cruise + hover_ref;
  const double seed_energy =
      uav.flight_power_w * seed_legs / ctx.cruise + uav.hover_power_w * hover_ref;
  const double da = ext.aoi_max - ext.aoi_min;
  const double de = ext.energy_max - ext.energy_min;
  ctx.aoi_weight =
      lambda * (f_weight + 1.0) / (ext.k * (da > 0.0 ? da : std::max(seed_time, 1.0)));
  ctx.energy_weight = (1.0 - lambda) / (de > 0.0 ? de : std::max(seed_energy, 1.0));

  std::vector<std::vector<Point2>> shapes;
  shapes.push_back(via_center_shape(geom));
  if (dist(geom.entry, geom.exit) > 1e-12) shapes.push_back(chord_shape(geom));

  Candidate best_any;
  Candidate best_guarded;
  bool have_guarded = false;
  for (const auto& shape : shapes) {
    for (const double sv :
         {ctx.cruise, ctx.vmax, 0.5 * ctx.cruise, 0.25 * ctx.cruise}) {
      Candidate c;
      c.w = shape;
      c.v.assign(shape.size() - 1, std::min(sv, ctx.vmax));
      repair_and_eval(c, ctx);
      if (c.obj < best_any.obj) best_any = c;
      if (within_budget(c, ctx) && (!have_guarded || c.obj < best_guarded.obj)) {
        best_guarded = c;
        have_guarded = true;
      }
    }
  }

  Candidate cur = have_guarded ? best_guarded : best_any;
  local_search(cur, ctx, have_guarded);

  DiscTraversal out;
  out.dwell_index = cur.dwell_index;
  out.dwell_s = cur.dwell_s;
  out.total_time_s = cur.time_s;
  out.energy_j = cur.energy_j;
  out.bits_collected = cur.bits;
  out.budget_met = within_budget(cur, ctx);
  out.waypoints = std::move(cur.w);
  out.segment_speeds_ms = std::move(cur.v);
  return out;
}

RefinedTour refine_tour(const MultiTour& tour, const Instance& inst, double lambda,
                        const Extremes& ext) {
  inst.validate();
  tour.validate(inst.k());
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("refine: lambda must lie in [0,1]");
  if (ext.k != inst.k())
    throw std::invalid_argument("refine: extremes were computed for a different instance");
  if (!(inst.cover_radius_m > 0.0))
    throw std::invalid_argument("refine: instance has no positive coverage radius");

  const WeightMatrix w = build_edge_weights(inst);
  const TourMetrics fly = evaluate_tour(tour, w);
  RefinedTour out;
  out.flyhover_avg_aoi_s = fly.avg_aoi_s;
  out.flyhover_energy_j = fly.energy_j;

  const double v = inst.uav.speed_ms;
  auto pos = [&](int sn) { return inst.sensors[static_cast<std::size_t>(sn) - 1]; };
  double age_sum = 0.0;
  double energy = 0.0;
  for (const auto& cycle : tour.cycles) {
    const int r = static_cast<int>(cycle.size());
    std::vector<DiscGeometry> geo(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) {
      const Point2 prev = j == 0 ? inst.depot : pos(cycle[j - 1]);
      const Point2 next = j == r - 1 ? inst.depot : pos(cycle[j + 1]);
      geo[j] = entry_exit(prev, pos(cycle[j]), next, inst.cover_radius_m);
    }

    // Leg budgets: whatever the straight fly-hover leg spends beyond the
    // refined gap is split between the two adjacent traversals (given whole
    // to the sensor side when the other end is the depot).
    std::vector<double> exit_budget(static_cast<std::size_t>(r), 0.0);
    std::vector<double> entry_budget(static_cast<std::size_t>(r), 0.0);
    entry_budget[0] = std::max(
        0.0, dist(inst.depot, pos(cycle[0])) - dist(inst.depot, geo[0].entry));
    for (int j = 0; j + 1 < r; ++j) {
      const double leg = dist(pos(cycle[j]), pos(cycle[j + 1]));
      const double gap = dist(geo[j].exit, geo[j + 1].entry);
      const double half = std::max(0.0, (leg - gap) / 2.0);
      exit_budget[j] = half;
      entry_budget[j + 1] = half;
    }
    exit_budget[r - 1] = std::max(
        0.0, dist(pos(cycle[r - 1]), inst.depot) - dist(geo[r - 1].exit, inst.depot));

    energy += inst.uav.flight_power_w * dist(inst.depot, geo[0].entry) / v;
    for (int j = 0; j < r; ++j) {
      DiscTraversal trav =
          refine_disc(geo[j], j, inst.data_bits[static_cast<std::size_t>(cycle[j]) - 1],
                      inst.radio, inst.uav, lambda, ext, exit_budget[j], entry_budget[j]);
      const double gap_m =
          j == r - 1 ? dist(geo[j].exit, inst.depot) : dist(geo[j].exit, geo[j + 1].entry);
      age_sum += (j + 1) * (trav.total_time_s + gap_m / v);
      energy += trav.energy_j + inst.uav.flight_power_w * gap_m / v;
      out.visits.push_back(SensorTrajectory{cycle[j], geo[j], std::move(trav)});
    }
  }
  out.avg_aoi_s = age_sum / inst.k();
  out.energy_j = energy;
  return out;
}

}  // namespace uavtour
