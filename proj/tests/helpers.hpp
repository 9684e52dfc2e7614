#pragma once

// Shared fixtures for the test binaries: the tabulated channel/UAV defaults
// and a couple of hand-sized layouts.

#include <cmath>
#include <vector>

#include "uavtour/io.hpp"
#include "uavtour/model.hpp"

namespace uavtour::testing {

inline RadioParams default_radio() {
  RadioParams r;
  r.bandwidth_hz = 2e6;
  r.tx_power_w = 0.1;
  r.ref_gain = std::pow(10.0, -60.0 / 10.0);         // -60 dB
  r.noise_w = std::pow(10.0, (-110.0 - 30.0) / 10.0);  // -110 dBm
  r.altitude_m = 100.0;
  return r;
}

inline UavPowerModel default_uav() {
  UavPowerModel u;
  u.speed_ms = 18.0;
  u.flight_power_w = 162.0;
  u.hover_power_w = 165.0;
  u.max_speed_ms = 30.0;
  return u;
}

/// Rotary-wing constants from the standard reference model; reproduce the
/// tabulated propulsion powers to within a few watts.
inline RotorConstants reference_rotor() {
  RotorConstants rc;
  rc.blade_power_w = 79.86;
  rc.induced_power_w = 88.63;
  rc.tip_speed_ms = 120.0;
  rc.hover_induced_ms = 4.03;
  rc.fuselage_drag = 0.6;
  rc.rotor_solidity = 0.05;
  rc.air_density = 1.225;
  rc.rotor_area_m2 = 0.503;
  return rc;
}

/// Depot at the origin, one sensor 100 m east, 500 Mbit payload.
inline Instance line_instance_one() {
  Instance inst;
  inst.depot = {0.0, 0.0};
  inst.sensors = {{100.0, 0.0}};
  inst.data_bits = {500e6};
  inst.radio = default_radio();
  inst.uav = default_uav();
  inst.cover_radius_m = 50.0;
  return inst;
}

/// Depot at the origin, sensors 100 m east and 100 m north, 500 Mbit each.
inline Instance corner_instance_two() {
  Instance inst;
  inst.depot = {0.0, 0.0};
  inst.sensors = {{100.0, 0.0}, {0.0, 100.0}};
  inst.data_bits = {500e6, 500e6};
  inst.radio = default_radio();
  inst.uav = default_uav();
  inst.cover_radius_m = 50.0;
  return inst;
}

/// Relative-tolerance comparison, |a-b| <= tol * (1 + max(|a|,|b|)).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace uavtour::testing
