#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "madcloud/sim/rng.hpp"

namespace madcloud::radio {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct PowerLevel {
  double tx_power_dbm = 0.0;
  double range_m = 0.0;
  double energy_per_packet_j = 0.0;
};

// Circular-range medium: within a level's range a packet is delivered with
// rx_success_ratio, in the annulus just beyond it is lost to interference,
// and further out nothing is heard.
struct RadioConfig {
  std::vector<PowerLevel> levels;
  double interference_extra_m = 20.0;
  double path_loss_exponent = 2.0;
  double rx_success_ratio = 1.0;

  int max_level() const { return static_cast<int>(levels.size()) - 1; }
  double max_range_m() const { return levels.back().range_m; }
  bool valid() const;
};

// Log-distance model. Distances under 1 m are clamped so the model stays
// finite.
double rssi_dbm(double tx_power_dbm, double distance_m, double path_loss_exponent);

// Inverts the log-distance model: 10^((tx_power - rssi) / (10 n)).
double estimate_distance_m(double tx_power_dbm, double rssi_dbm, double path_loss_exponent);

// Lowest power level whose range covers the distance (boundary inclusive).
// Empty when the distance exceeds the maximum range.
std::optional<int> min_power_level(double distance_m, const RadioConfig& radio);

enum class Delivery { Delivered, Lost, OutOfRange };

// One reception attempt at the given level and distance. The draw comes from
// the packet-loss stream.
Delivery deliverable(double distance_m, int level, const RadioConfig& radio,
                     sim::RngStream& loss_rng);

} // namespace madcloud::radio
