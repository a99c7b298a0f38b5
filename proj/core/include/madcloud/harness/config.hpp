#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "madcloud/mw/middleware.hpp"
#include "madcloud/mw/model.hpp"
#include "madcloud/net/network.hpp"
#include "madcloud/radio/mobility.hpp"
#include "madcloud/radio/radio.hpp"

namespace madcloud::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PowerMode { Multi, MaxOnly };

const char* to_string(PowerMode mode);

// One of Table-style hardware profiles nodes are drawn from.
struct MoteType {
  double cpi = 2.0;
  double cct_s = 2e-9;
  double phi_s = 1e-3;
  double p_static_w = 0.1;
  double active_gates = 10.0;
  double capacitance_f = 1e-10;
  double voltage_v = 1.0;
  double frequency_hz = 5e8;
  double beta_j_per_packet = 6e-4;
  std::int64_t memory_bytes = 192LL << 20;
  double battery_j = 2500.0;
};

struct WorkloadConfig {
  int tasks = 20;
  std::int64_t instructions_lo = 100'000'000;
  std::int64_t instructions_hi = 1'000'000'000;
  std::int64_t input_bits_lo = 500'000;
  std::int64_t input_bits_hi = 4'000'000;
  double output_fraction = 0.1;
  std::int64_t code_bits = 100'000;
  double submit_start_s = 120.0;
  double submit_end_s = 900.0;
};

struct GroupConfig {
  std::vector<NodeId> members;
  double speed_mps = 1.0;
  double jitter_m = 20.0;
  radio::Region region; // all-zero means the whole area
};

struct ScenarioConfig {
  std::string name = "custom";
  double area_m = 1200.0;
  double sim_time_s = 3600.0;
  int nodes = 20;
  NodeId smn = 0;
  std::vector<NodeId> scns = {1, 2, 3};
  std::vector<MoteType> mote_types;
  std::vector<int> node_type; // index into mote_types per node; empty = id % types
  std::vector<GroupConfig> groups;
  radio::RadioConfig radio;
  net::NetConfig net;
  mw::MiddlewareConfig mw;
  WorkloadConfig workload;
  double mobility_step_s = 1.0;
  mw::Scheme scheme = mw::Scheme::Proposed;
  PowerMode power_mode = PowerMode::Multi;
  std::uint64_t seed = 1;

  // Throws ConfigError with a description when a constraint is broken.
  void validate() const;

  Role role_of(NodeId id) const;
  const MoteType& type_of(NodeId id) const;
  std::vector<mw::NodeSpec> node_specs() const;
};

// Defaults shared by every scenario (Table-style parameters).
ScenarioConfig default_config();

// Built-in scenario presets: "s1" (mixed groups, slow), "s2" (high mobility),
// "s3" (uniform grid, max power only), "s4" (clustered groups).
ScenarioConfig preset(const std::string& name);

// Loads a JSON config file. An optional "preset" key selects the baseline the
// remaining keys override.
ScenarioConfig load_config_file(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

mw::Scheme parse_scheme(const std::string& name);
PowerMode parse_power_mode(const std::string& name);

} // namespace madcloud::harness
