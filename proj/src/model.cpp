#include "uavtour/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace uavtour {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void RadioParams::validate() const {
  require(finite_pos(bandwidth_hz), "radio: bandwidth must be finite and > 0");
  require(finite_pos(tx_power_w), "radio: tx power must be finite and > 0");
  require(finite_pos(ref_gain), "radio: reference gain must be finite and > 0");
  require(finite_pos(noise_w), "radio: noise power must be finite and > 0");
  require(finite_pos(altitude_m), "radio: altitude must be finite and > 0");
}

void UavPowerModel::validate() const {
  require(finite_pos(speed_ms), "uav: cruise speed must be finite and > 0");
  require(finite_pos(flight_power_w), "uav: flight power must be finite and > 0");
  require(finite_pos(hover_power_w), "uav: hover power must be finite and > 0");
  require(finite_pos(max_speed_ms), "uav: max speed must be finite and > 0");
  require(speed_ms <= max_speed_ms, "uav: cruise speed exceeds max speed");
  if (rotor) {
    const RotorConstants& r = *rotor;
    require(finite_pos(r.blade_power_w) && finite_pos(r.induced_power_w) &&
                finite_pos(r.tip_speed_ms) && finite_pos(r.hover_induced_ms) &&
                finite_pos(r.fuselage_drag) && finite_pos(r.rotor_solidity) &&
                finite_pos(r.air_density) && finite_pos(r.rotor_area_m2),
            "uav: rotor constants must be finite and > 0");
  }
}

void Instance::validate() const {
  require(!sensors.empty(), "instance: needs at least one sensor");
  require(data_bits.size() == sensors.size(),
          "instance: data_bits size must match sensor count");
  for (double d : data_bits)
    require(std::isfinite(d) && d >= 0.0, "instance: data demand must be finite and >= 0");
  require(std::isfinite(depot.x) && std::isfinite(depot.y), "instance: depot not finite");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    require(std::isfinite(sensors[i].x) && std::isfinite(sensors[i].y),
            "instance: sensor position not finite");
    if (dist(sensors[i], depot) < 1e-9) {
      std::ostringstream os;
      os << "instance: sensor " << (i + 1) << " coincides with the depot";
      throw std::invalid_argument(os.str());
    }
    for (std::size_t j = i + 1; j < sensors.size(); ++j) {
      if (dist(sensors[i], sensors[j]) < 1e-9) {
        std::ostringstream os;
        os << "instance: sensors " << (i + 1) << " and " << (j + 1) << " coincide";
        throw std::invalid_argument(os.str());
      }
    }
  }
  require(std::isfinite(cover_radius_m) && cover_radius_m >= 0.0,
          "instance: coverage radius must be finite and >= 0");
  radio.validate();
  uav.validate();
}

double achievable_rate(const RadioParams& radio, double horizontal_dist_m) {
  radio.validate();
  require(std::isfinite(horizontal_dist_m) && horizontal_dist_m >= 0.0,
          "rate: horizontal distance must be finite and >= 0");
  const double h2 = radio.altitude_m * radio.altitude_m;
  const double d2 = horizontal_dist_m * horizontal_dist_m;
  const double snr = radio.tx_power_w * radio.ref_gain / (radio.noise_w * (h2 + d2));
  // log1p keeps the rate strictly positive even when the SNR underflows
  // the 1 + snr addition.
  return radio.bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

double hover_time_s(const RadioParams& radio, double data_bits) {
  require(std::isfinite(data_bits) && data_bits >= 0.0,
          "hover time: data demand must be finite and >= 0");
  if (data_bits == 0.0) return 0.0;
  return data_bits / achievable_rate(radio, 0.0);
}

double propulsion_power(const UavPowerModel& uav, double speed_ms) {
  if (!uav.rotor) throw RotorModelUnavailable();
  require(std::isfinite(speed_ms) && speed_ms >= 0.0 && speed_ms <= uav.max_speed_ms,
          "propulsion power: speed outside [0, Vmax]");
  const RotorConstants& r = *uav.rotor;
  const double v2 = speed_ms * speed_ms;
  const double blade = r.blade_power_w * (1.0 + 3.0 * v2 / (r.tip_speed_ms * r.tip_speed_ms));
  const double v0_2 = r.hover_induced_ms * r.hover_induced_ms;
  const double induced =
      r.induced_power_w *
      std::sqrt(std::sqrt(1.0 + v2 * v2 / (4.0 * v0_2 * v0_2)) - v2 / (2.0 * v0_2));
  const double parasite = 0.5 * r.fuselage_drag * r.air_density * r.rotor_solidity *
                          r.rotor_area_m2 * v2 * speed_ms;
  return blade + induced + parasite;
}

WeightMatrix build_edge_weights(const Instance& inst) {
  inst.validate();
  const int k = inst.k();
  const int n = k + 1;

  // Node positions with the depot as node 0.
  std::vector<Point2> pos(n);
  pos[0] = inst.depot;
  for (int i = 1; i <= k; ++i) pos[i] = inst.sensors[i - 1];

  // Hover (upload) time charged when *leaving* node i.
  std::vector<double> th(n, 0.0);
  for (int i = 1; i <= k; ++i) th[i] = hover_time_s(inst.radio, inst.data_bits[i - 1]);

  WeightMatrix w;
  w.k = k;
  w.time_s.assign(static_cast<std::size_t>(n) * n, 0.0);
  w.energy_j.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double fly = dist(pos[i], pos[j]) / inst.uav.speed_ms;
      w.time_s[w.idx(i, j)] = th[i] + fly;
      w.energy_j[w.idx(i, j)] =
          inst.uav.hover_power_w * th[i] + inst.uav.flight_power_w * fly;
    }
  }
  return w;
}

}  // namespace uavtour
