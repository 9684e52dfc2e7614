#pragma once

#include <optional>
#include <vector>

#include "uavtour/errors.hpp"
#include "uavtour/geometry.hpp"

namespace uavtour {

/// Air-to-ground channel parameters, all in linear SI units (Hz, W, metres).
/// File loaders convert from the conventional MHz / dBm / dB fields.
struct RadioParams {
  double bandwidth_hz{0.0};   ///< channel bandwidth B
  double tx_power_w{0.0};     ///< sensor transmit power Pt
  double ref_gain{0.0};       ///< channel gain at 1 m reference distance (linear)
  double noise_w{0.0};        ///< receiver noise power sigma^2 (linear W)
  double altitude_m{0.0};     ///< fixed flight altitude H

  /// Throws std::invalid_argument unless every field is finite and positive.
  void validate() const;
};

/// Rotary-wing propulsion constants for the closed-form power curve.
struct RotorConstants {
  double blade_power_w{0.0};     ///< blade profile power in hover, P0
  double induced_power_w{0.0};   ///< induced power in hover, Pi
  double tip_speed_ms{0.0};      ///< rotor blade tip speed, Utip
  double hover_induced_ms{0.0};  ///< mean rotor induced velocity in hover, v0
  double fuselage_drag{0.0};     ///< fuselage drag ratio, d0
  double rotor_solidity{0.0};    ///< rotor solidity, s
  double air_density{0.0};       ///< air density, rho
  double rotor_area_m2{0.0};     ///< rotor disc area, A
};

/// UAV kinematics and power draw. `flight_power_w` / `hover_power_w` are the
/// tabulated values used for edge weights; `rotor` enables the speed-dependent
/// power curve needed when trajectory refinement re-optimises speeds.
struct UavPowerModel {
  double speed_ms{0.0};        ///< cruise speed V used for inter-node legs
  double flight_power_w{0.0};  ///< propulsion power at cruise speed, P^f
  double hover_power_w{0.0};   ///< propulsion power when hovering, P^h
  double max_speed_ms{0.0};    ///< hard speed limit Vmax
  std::optional<RotorConstants> rotor;

  /// Throws std::invalid_argument on non-positive/non-finite fields or
  /// speed_ms > max_speed_ms.
  void validate() const;
};

/// One planning problem: a depot, K sensor nodes with upload demands, and the
/// channel / UAV parameters shared by all of them.
struct Instance {
  Point2 depot;
  std::vector<Point2> sensors;    ///< sensor i is sensors[i-1]
  std::vector<double> data_bits;  ///< upload demand per sensor, in bits
  RadioParams radio;
  UavPowerModel uav;
  double cover_radius_m{0.0};     ///< QoS disc radius d_th for refinement

  int k() const { return static_cast<int>(sensors.size()); }

  /// Structural validation: K >= 1, sizes agree, nodes pairwise distinct,
  /// demands non-negative, parameter blocks valid. Throws std::invalid_argument.
  void validate() const;
};

/// Dense (K+1)x(K+1) travel-time and energy weights over nodes {0..K},
/// node 0 being the depot. Diagonal entries are 0 and must not be used.
struct WeightMatrix {
  int k{0};
  std::vector<double> time_s;    ///< row-major (k+1)^2
  std::vector<double> energy_j;  ///< row-major (k+1)^2

  double time(int i, int j) const { return time_s[idx(i, j)]; }
  double energy(int i, int j) const { return energy_j[idx(i, j)]; }

  int idx(int i, int j) const { return i * (k + 1) + j; }
};

/// Achievable uplink rate (bits/s) from a sensor to the UAV hovering at
/// altitude H with horizontal offset `horizontal_dist_m`:
///   R = B * log2(1 + Pt * rho0 / (sigma^2 * (H^2 + d^2))).
/// Throws std::invalid_argument on invalid params or non-finite/negative d.
double achievable_rate(const RadioParams& radio, double horizontal_dist_m);

/// Time to upload `data_bits` while hovering directly above the sensor.
double hover_time_s(const RadioParams& radio, double data_bits);

/// Speed-dependent rotary-wing propulsion power
///   P(v) = P0 (1 + 3v^2/Utip^2) + Pi (sqrt(1 + v^4/(4 v0^4)) - v^2/(2 v0^2))^(1/2)
///        + (1/2) d0 rho s A v^3.
/// Requires uav.rotor; throws RotorModelUnavailable otherwise, and
/// std::invalid_argument when v is outside [0, max_speed_ms].
double propulsion_power(const UavPowerModel& uav, double speed_ms);

/// Edge weights for the complete digraph over {depot} + sensors:
///   T_ij = T^h_i + ||w_i - w_j|| / V,  T^h_0 = 0, T^h_i = D_i / R_i(0)
///   E_ij = P^h * T^h_i + P^f * ||w_i - w_j|| / V.
/// The hover term at the *tail* node i prices finishing i's upload before
/// flying on; leaving the depot carries no hover term.
WeightMatrix build_edge_weights(const Instance& inst);

}  // namespace uavtour
