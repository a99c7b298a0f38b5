#include "madcloud/radio/radio.hpp"

namespace madcloud::radio {

bool RadioConfig::valid() const {
  if (levels.empty() || path_loss_exponent <= 0.0) return false;
  if (rx_success_ratio < 0.0 || rx_success_ratio > 1.0) return false;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i].tx_power_dbm <= levels[i - 1].tx_power_dbm) return false;
    if (levels[i].range_m <= levels[i - 1].range_m) return false;
  }
  return true;
}

double rssi_dbm(double tx_power_dbm, double distance_m, double path_loss_exponent) {
  const double d = std::max(distance_m, 1.0);
  return tx_power_dbm - 10.0 * path_loss_exponent * std::log10(d);
}

double estimate_distance_m(double tx_power_dbm, double rssi_dbm, double path_loss_exponent) {
  return std::pow(10.0, (tx_power_dbm - rssi_dbm) / (10.0 * path_loss_exponent));
}

std::optional<int> min_power_level(double distance_m, const RadioConfig& radio) {
  for (std::size_t i = 0; i < radio.levels.size(); ++i) {
    if (distance_m <= radio.levels[i].range_m) return static_cast<int>(i);
  }
  return std::nullopt;
}

Delivery deliverable(double distance_m, int level, const RadioConfig& radio,
                     sim::RngStream& loss_rng) {
  const double range = radio.levels[static_cast<std::size_t>(level)].range_m;
  if (distance_m <= range) {
    return loss_rng.bernoulli(radio.rx_success_ratio) ? Delivery::Delivered : Delivery::Lost;
  }
  if (distance_m <= range + radio.interference_extra_m) return Delivery::Lost;
  return Delivery::OutOfRange;
}

} // namespace madcloud::radio
