#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uavtour/benders.hpp"
#include "uavtour/formulation.hpp"
#include "uavtour/model.hpp"
#include "uavtour/tours.hpp"
#include "uavtour/trajopt.hpp"

namespace uavtour {

/// Parses an instance from its JSON text. Conventional units (MHz, dB, dBm,
/// Mbit) are converted to the linear SI fields of Instance.
Instance parse_instance(const std::string& json_text);

/// Serialises an instance back to the JSON convention of parse_instance.
std::string instance_to_json(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

/// Deterministically places `k` sensors uniformly in an area_m x area_m
/// square (depot at the centre) with all pairwise distances >= 1 m, filling
/// in the tabulated channel and UAV defaults.
Instance gen_instance(int k, double area_m, std::uint64_t seed);

MultiTour parse_tour(const std::string& json_text);
std::string tour_to_json(const MultiTour& tour);
MultiTour load_tour(const std::string& path);
void save_tour(const MultiTour& tour, const std::string& path);

/// `lambda,avg_aoi_s,energy_j,n_cycles,solver,iterations,runtime_ms`
std::string sweep_csv(const std::vector<ParetoPoint>& points);
std::string sweep_json(const std::vector<ParetoPoint>& points);

/// `iter,lb,ub,cut_kind,master_obj,subproblem_obj` ("inf" for unbounded)
std::string trace_csv(const std::vector<TraceRow>& trace);

/// `avg_aoi_s,energy_j,n_cycles`
std::string metrics_csv(double avg_aoi_s, double energy_j, int n_cycles);

/// Refined trajectory with per-sensor waypoint lists and aggregate metrics.
std::string refined_to_json(const RefinedTour& refined);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace uavtour
