// Python bindings for the tour planner: instances and tours travel as JSON
// text or plain lists, results come back as dicts, so the module needs no
// wrapped classes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "uavtour/benders.hpp"
#include "uavtour/errors.hpp"
#include "uavtour/formulation.hpp"
#include "uavtour/io.hpp"
#include "uavtour/model.hpp"
#include "uavtour/tours.hpp"
#include "uavtour/trajopt.hpp"

namespace py = pybind11;
using namespace uavtour;

namespace {

MultiTour tour_from_cycles(const std::vector<std::vector<int>>& cycles, int k) {
  MultiTour t;
  t.cycles = cycles;
  t.validate(k);
  return t;
}

py::list cycles_to_list(const MultiTour& t) {
  py::list out;
  for (const auto& cycle : t.cycles) {
    py::list c;
    for (int sn : cycle) c.append(sn);
    out.append(c);
  }
  return out;
}

py::dict point_to_dict(const ParetoPoint& p) {
  py::dict d;
  d["lambda"] = p.lambda;
  d["avg_aoi_s"] = p.avg_aoi_s;
  d["energy_j"] = p.energy_j;
  d["cycles"] = cycles_to_list(p.tour);
  d["n_cycles"] = static_cast<int>(p.tour.cycles.size());
  d["solver"] = p.solver;
  d["iterations"] = p.iterations;
  d["runtime_ms"] = p.runtime_ms;
  return d;
}

py::list point_to_xy(const Point2& p) {
  py::list xy;
  xy.append(p.x);
  xy.append(p.y);
  return xy;
}

py::dict refined_to_dict(const RefinedTour& r) {
  py::dict d;
  d["avg_aoi_s"] = r.avg_aoi_s;
  d["energy_j"] = r.energy_j;
  d["flyhover_avg_aoi_s"] = r.flyhover_avg_aoi_s;
  d["flyhover_energy_j"] = r.flyhover_energy_j;
  py::list visits;
  for (const SensorTrajectory& v : r.visits) {
    py::dict vd;
    vd["sn"] = v.sn;
    vd["entry"] = point_to_xy(v.geom.entry);
    vd["exit"] = point_to_xy(v.geom.exit);
    py::list wps;
    for (const Point2& w : v.traversal.waypoints) wps.append(point_to_xy(w));
    vd["waypoints"] = wps;
    py::list speeds;
    for (double s : v.traversal.segment_speeds_ms) speeds.append(s);
    vd["speeds_ms"] = speeds;
    vd["dwell_index"] = v.traversal.dwell_index;
    vd["dwell_s"] = v.traversal.dwell_s;
    vd["time_s"] = v.traversal.total_time_s;
    vd["energy_j"] = v.traversal.energy_j;
    vd["bits"] = v.traversal.bits_collected;
    visits.append(vd);
  }
  d["visits"] = visits;
  return d;
}

SolverChoice pick_solver(const std::string& name) {
  if (name == "benders") return SolverChoice::Benders;
  if (name == "monolithic") return SolverChoice::Monolithic;
  throw std::invalid_argument("unknown solver '" + name + "' (benders|monolithic)");
}

}  // namespace

PYBIND11_MODULE(_uavtour, m) {
  m.doc() = "Multi-return UAV data-collection tour planner (age/energy trade-off)";

  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def(
      "generate",
      [](int k, double area_m, std::uint64_t seed) {
        return instance_to_json(gen_instance(k, area_m, seed));
      },
      py::arg("k"), py::arg("area_m") = 1000.0, py::arg("seed") = 1,
      "Deterministically generate an instance; returns its JSON text.");

  m.def(
      "evaluate",
      [](const std::string& instance_json, const std::vector<std::vector<int>>& cycles) {
        const Instance inst = parse_instance(instance_json);
        const WeightMatrix w = build_edge_weights(inst);
        const MultiTour tour = tour_from_cycles(cycles, inst.k());
        const TourMetrics metrics = evaluate_tour(tour, w);
        py::dict d;
        d["avg_aoi_s"] = metrics.avg_aoi_s;
        d["energy_j"] = metrics.energy_j;
        d["n_cycles"] = static_cast<int>(tour.cycles.size());
        py::list ages;
        for (double a : metrics.aoi_s) ages.append(a);
        d["aoi_s"] = ages;
        return d;
      },
      py::arg("instance_json"), py::arg("cycles"),
      "Exact fly-hover metrics of a tour given as [[sensor ids], ...].");

  m.def(
      "extremes",
      [](const std::string& instance_json) {
        const Instance inst = parse_instance(instance_json);
        const Extremes ext = compute_extremes(build_edge_weights(inst));
        py::dict d;
        d["aoi_min"] = ext.aoi_min;
        d["aoi_max"] = ext.aoi_max;
        d["energy_min"] = ext.energy_min;
        d["energy_max"] = ext.energy_max;
        d["star_cycles"] = cycles_to_list(ext.star_tour);
        d["tsp_cycles"] = cycles_to_list(ext.tsp_tour);
        return d;
      },
      py::arg("instance_json"),
      "Normalisation anchors and the tours that realise them.");

  m.def(
      "solve",
      [](const std::string& instance_json, double lam, const std::string& solver,
         double tol, bool with_trace) {
        const Instance inst = parse_instance(instance_json);
        const WeightMatrix w = build_edge_weights(inst);
        const Extremes ext = compute_extremes(w);
        if (pick_solver(solver) == SolverChoice::Monolithic) {
          if (with_trace)
            throw std::invalid_argument("trace is only available from the benders solver");
          return point_to_dict(solve_scalarized_monolithic(w, ext, lam));
        }
        const BendersResult res = benders_solve(w, ext, lam, tol);
        py::dict d = point_to_dict(res.point);
        if (with_trace) {
          py::list rows;
          for (const TraceRow& r : res.trace) {
            py::dict rd;
            rd["iter"] = r.iter;
            rd["lb"] = r.lb;
            rd["ub"] = r.ub;
            rd["cut_kind"] =
                r.cut_kind == CutKind::Optimality ? "optimality" : "feasibility";
            rd["master_obj"] = r.master_obj;
            rd["subproblem_obj"] = r.subproblem_obj;
            rows.append(rd);
          }
          d["trace"] = rows;
        }
        return d;
      },
      py::arg("instance_json"), py::arg("lam") = 0.5, py::arg("solver") = "benders",
      py::arg("tol") = 1e-6, py::arg("with_trace") = false,
      "Optimal tour for one scalarisation weight.");

  m.def(
      "sweep",
      [](const std::string& instance_json, const std::vector<double>& lambdas,
         const std::string& solver, double tol, int jobs, bool keep_duplicates) {
        const Instance inst = parse_instance(instance_json);
        const std::vector<ParetoPoint> points =
            pareto_sweep(inst, lambdas, pick_solver(solver), tol, jobs, keep_duplicates);
        py::list out;
        for (const ParetoPoint& p : points) out.append(point_to_dict(p));
        return out;
      },
      py::arg("instance_json"), py::arg("lambdas"), py::arg("solver") = "benders",
      py::arg("tol") = 1e-6, py::arg("jobs") = 1, py::arg("keep_duplicates") = false,
      "Trade-off curve over a list of weights, deduplicated by tour.");

  m.def(
      "lambda_grid",
      [](double a, double step, double b) { return lambda_grid(a, step, b); },
      py::arg("a"), py::arg("step"), py::arg("b"),
      "Inclusive weight grid a:step:b.");

  m.def(
      "refine",
      [](const std::string& instance_json, const std::vector<std::vector<int>>& cycles,
         double lam) {
        const Instance inst = parse_instance(instance_json);
        const WeightMatrix w = build_edge_weights(inst);
        const Extremes ext = compute_extremes(w);
        const MultiTour tour = tour_from_cycles(cycles, inst.k());
        return refined_to_dict(refine_tour(tour, inst, lam, ext));
      },
      py::arg("instance_json"), py::arg("cycles"), py::arg("lam") = 0.5,
      "Coverage-disc trajectory refinement of a tour, with fly-hover references.");

  m.def(
      "oracle_front",
      [](const std::string& instance_json) {
        const Instance inst = parse_instance(instance_json);
        const OracleResult oracle = oracle_pareto(inst);
        py::list out;
        for (const OraclePoint& p : oracle.pareto) {
          py::dict d;
          d["cycles"] = cycles_to_list(p.tour);
          d["avg_aoi_s"] = p.avg_aoi_s;
          d["energy_j"] = p.energy_j;
          out.append(d);
        }
        return out;
      },
      py::arg("instance_json"),
      "Exhaustively enumerated non-dominated tours (small instances only).");
}
