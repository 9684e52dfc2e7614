#include "uavtour/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace uavtour {

namespace {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

const json& need(const json& obj, const char* key, const char* ctx) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw std::invalid_argument(std::string(ctx) + ": missing key \"" + key + "\"");
  return *it;
}

double num(const json& obj, const char* key, const char* ctx) {
  const json& v = need(obj, key, ctx);
  if (!v.is_number())
    throw std::invalid_argument(std::string(ctx) + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

Point2 parse_point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(std::string("instance: ") + what + " must be [x, y]");
  return Point2{j[0].get<double>(), j[1].get<double>()};
}

json point_json(const Point2& p) { return json::array({p.x, p.y}); }

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

Instance parse_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("instance: top level must be an object");

  Instance inst;
  inst.depot = parse_point(need(j, "depot", "instance"), "depot");
  const json& sensors = need(j, "sensors", "instance");
  if (!sensors.is_array() || sensors.empty())
    throw std::invalid_argument("instance: \"sensors\" must be a non-empty array");
  for (const auto& s : sensors) inst.sensors.push_back(parse_point(s, "sensor"));
  const json& data = need(j, "data_mbits", "instance");
  if (!data.is_array() || data.size() != sensors.size())
    throw std::invalid_argument("instance: \"data_mbits\" must list one value per sensor");
  for (const auto& d : data) {
    if (!d.is_number())
      throw std::invalid_argument("instance: \"data_mbits\" entries must be numbers");
    inst.data_bits.push_back(d.get<double>() * 1e6);
  }

  const json& radio = need(j, "radio", "instance");
  inst.radio.bandwidth_hz = num(radio, "bandwidth_mhz", "instance.radio") * 1e6;
  inst.radio.tx_power_w = num(radio, "tx_power_w", "instance.radio");
  inst.radio.ref_gain = db_to_linear(num(radio, "ref_gain_db", "instance.radio"));
  inst.radio.noise_w = dbm_to_watt(num(radio, "noise_dbm", "instance.radio"));
  inst.radio.altitude_m = num(radio, "altitude_m", "instance.radio");

  const json& uav = need(j, "uav", "instance");
  inst.uav.speed_ms = num(uav, "speed_ms", "instance.uav");
  inst.uav.flight_power_w = num(uav, "pf_w", "instance.uav");
  inst.uav.hover_power_w = num(uav, "ph_w", "instance.uav");
  inst.uav.max_speed_ms = num(uav, "vmax_ms", "instance.uav");
  if (uav.contains("rotor")) {
    const json& r = uav["rotor"];
    RotorConstants rc;
    rc.blade_power_w = num(r, "p0_w", "instance.uav.rotor");
    rc.induced_power_w = num(r, "pi_w", "instance.uav.rotor");
    rc.tip_speed_ms = num(r, "utip_ms", "instance.uav.rotor");
    rc.hover_induced_ms = num(r, "v0_ms", "instance.uav.rotor");
    rc.fuselage_drag = num(r, "d0", "instance.uav.rotor");
    rc.rotor_solidity = num(r, "s", "instance.uav.rotor");
    rc.air_density = num(r, "rho", "instance.uav.rotor");
    rc.rotor_area_m2 = num(r, "a_m2", "instance.uav.rotor");
    inst.uav.rotor = rc;
  }

  inst.cover_radius_m = num(j, "d_th_m", "instance");
  inst.validate();
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["depot"] = point_json(inst.depot);
  json sensors = json::array();
  for (const auto& s : inst.sensors) sensors.push_back(point_json(s));
  j["sensors"] = std::move(sensors);
  json data = json::array();
  for (double d : inst.data_bits) data.push_back(d / 1e6);
  j["data_mbits"] = std::move(data);
  j["radio"] = {{"bandwidth_mhz", inst.radio.bandwidth_hz / 1e6},
                {"tx_power_w", inst.radio.tx_power_w},
                {"ref_gain_db", linear_to_db(inst.radio.ref_gain)},
                {"noise_dbm", watt_to_dbm(inst.radio.noise_w)},
                {"altitude_m", inst.radio.altitude_m}};
  j["uav"] = {{"speed_ms", inst.uav.speed_ms},
              {"pf_w", inst.uav.flight_power_w},
              {"ph_w", inst.uav.hover_power_w},
              {"vmax_ms", inst.uav.max_speed_ms}};
  if (inst.uav.rotor) {
    const RotorConstants& r = *inst.uav.rotor;
    j["uav"]["rotor"] = {{"p0_w", r.blade_power_w},   {"pi_w", r.induced_power_w},
                         {"utip_ms", r.tip_speed_ms}, {"v0_ms", r.hover_induced_ms},
                         {"d0", r.fuselage_drag},     {"s", r.rotor_solidity},
                         {"rho", r.air_density},      {"a_m2", r.rotor_area_m2}};
  }
  j["d_th_m"] = inst.cover_radius_m;
  return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) { return parse_instance(read_text_file(path)); }

void save_instance(const Instance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst));
}

Instance gen_instance(int k, double area_m, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("gen: k must be >= 1");
  if (!(area_m > 2.0) || !std::isfinite(area_m))
    throw std::invalid_argument("gen: area side must exceed 2 m");

  std::mt19937_64 rng(seed);
  // Raw 53-bit mantissa draw; engine output is standardised, distributions
  // are not, and determinism across platforms matters here.
  const auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  Instance inst;
  inst.depot = Point2{area_m / 2.0, area_m / 2.0};
  const double min_sep = 1.0;
  const long max_tries = 1000L * k;
  long tries = 0;
  while (static_cast<int>(inst.sensors.size()) < k) {
    if (++tries > max_tries)
      throw std::invalid_argument("gen: could not place distinct sensors; enlarge the area");
    const Point2 p{u01() * area_m, u01() * area_m};
    bool ok = dist(p, inst.depot) >= min_sep;
    for (const auto& q : inst.sensors)
      if (ok) ok = dist(p, q) >= min_sep;
    if (ok) inst.sensors.push_back(p);
  }

  inst.data_bits.assign(static_cast<std::size_t>(k), 500e6);
  inst.radio = RadioParams{2e6, 0.1, db_to_linear(-60.0), dbm_to_watt(-110.0), 100.0};
  inst.uav = UavPowerModel{18.0, 162.0, 165.0, 30.0, std::nullopt};
  inst.cover_radius_m = 50.0;
  inst.validate();
  return inst;
}

MultiTour parse_tour(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("tour: not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("cycles") || !j["cycles"].is_array())
    throw std::invalid_argument("tour: expected {\"cycles\": [[...], ...]}");
  MultiTour tour;
  for (const auto& c : j["cycles"]) {
    if (!c.is_array() || c.empty())
      throw std::invalid_argument("tour: every cycle must be a non-empty array");
    std::vector<int> cycle;
    for (const auto& v : c) {
      if (!v.is_number_integer() || v.get<long long>() < 1)
        throw std::invalid_argument("tour: sensor ids must be integers >= 1");
      cycle.push_back(v.get<int>());
    }
    tour.cycles.push_back(std::move(cycle));
  }
  return tour;
}

std::string tour_to_json(const MultiTour& tour) {
  json cycles = json::array();
  for (const auto& c : tour.cycles) cycles.push_back(c);
  return json{{"cycles", std::move(cycles)}}.dump() + "\n";
}

MultiTour load_tour(const std::string& path) { return parse_tour(read_text_file(path)); }

void save_tour(const MultiTour& tour, const std::string& path) {
  write_text_file(path, tour_to_json(tour));
}

std::string sweep_csv(const std::vector<ParetoPoint>& points) {
  std::ostringstream os;
  os << "lambda,avg_aoi_s,energy_j,n_cycles,solver,iterations,runtime_ms\n";
  for (const auto& p : points) {
    os << fmt(p.lambda) << ',' << fmt(p.avg_aoi_s) << ',' << fmt(p.energy_j) << ','
       << p.tour.cycles.size() << ',' << p.solver << ',' << p.iterations << ','
       << fmt(p.runtime_ms) << '\n';
  }
  return os.str();
}

std::string sweep_json(const std::vector<ParetoPoint>& points) {
  json rows = json::array();
  for (const auto& p : points) {
    json cycles = json::array();
    for (const auto& c : p.tour.cycles) cycles.push_back(c);
    rows.push_back({{"lambda", p.lambda},
                    {"avg_aoi_s", p.avg_aoi_s},
                    {"energy_j", p.energy_j},
                    {"n_cycles", p.tour.cycles.size()},
                    {"solver", p.solver},
                    {"iterations", p.iterations},
                    {"runtime_ms", p.runtime_ms},
                    {"cycles", std::move(cycles)}});
  }
  return rows.dump(2) + "\n";
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream os;
  os << "iter,lb,ub,cut_kind,master_obj,subproblem_obj\n";
  for (const auto& r : trace) {
    os << r.iter << ',' << fmt(r.lb) << ',' << fmt(r.ub) << ','
       << (r.cut_kind == CutKind::Optimality ? "optimality" : "feasibility") << ','
       << fmt(r.master_obj) << ',' << fmt(r.subproblem_obj) << '\n';
  }
  return os.str();
}

std::string metrics_csv(double avg_aoi_s, double energy_j, int n_cycles) {
  std::ostringstream os;
  os << "avg_aoi_s,energy_j,n_cycles\n"
     << fmt(avg_aoi_s) << ',' << fmt(energy_j) << ',' << n_cycles << '\n';
  return os.str();
}

std::string refined_to_json(const RefinedTour& refined) {
  json visits = json::array();
  for (const auto& v : refined.visits) {
    json waypoints = json::array();
    for (const auto& p : v.traversal.waypoints) waypoints.push_back(point_json(p));
    visits.push_back({{"sn", v.sn},
                      {"entry", point_json(v.geom.entry)},
                      {"exit", point_json(v.geom.exit)},
                      {"waypoints", std::move(waypoints)},
                      {"speeds", v.traversal.segment_speeds_ms},
                      {"dwell_index", v.traversal.dwell_index},
                      {"dwell_s", v.traversal.dwell_s},
                      {"time_s", v.traversal.total_time_s},
                      {"energy_j", v.traversal.energy_j},
                      {"bits", v.traversal.bits_collected}});
  }
  json j{{"avg_aoi_s", refined.avg_aoi_s},
         {"energy_j", refined.energy_j},
         {"flyhover_avg_aoi_s", refined.flyhover_avg_aoi_s},
         {"flyhover_energy_j", refined.flyhover_energy_j},
         {"visits", std::move(visits)}};
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace uavtour
