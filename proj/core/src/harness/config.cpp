#include "madcloud/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace madcloud::harness {

using nlohmann::json;

const char* to_string(PowerMode mode) {
  return mode == PowerMode::Multi ? "multi" : "max-only";
}

mw::Scheme parse_scheme(const std::string& name) {
  if (name == "proposed") return mw::Scheme::Proposed;
  if (name == "hta") return mw::Scheme::Hta;
  if (name == "minhop") return mw::Scheme::MinHop;
  throw ConfigError("unknown scheme '" + name + "' (expected proposed|hta|minhop)");
}

PowerMode parse_power_mode(const std::string& name) {
  if (name == "multi") return PowerMode::Multi;
  if (name == "max-only") return PowerMode::MaxOnly;
  throw ConfigError("unknown power mode '" + name + "' (expected multi|max-only)");
}

Role ScenarioConfig::role_of(NodeId id) const {
  if (id == smn) return Role::Master;
  if (std::find(scns.begin(), scns.end(), id) != scns.end()) return Role::Consumer;
  return Role::Provider;
}

const MoteType& ScenarioConfig::type_of(NodeId id) const {
  if (!node_type.empty()) {
    return mote_types[static_cast<std::size_t>(node_type[static_cast<std::size_t>(id)])];
  }
  return mote_types[static_cast<std::size_t>(id) % mote_types.size()];
}

std::vector<mw::NodeSpec> ScenarioConfig::node_specs() const {
  std::vector<mw::NodeSpec> specs;
  specs.reserve(static_cast<std::size_t>(nodes));
  for (NodeId id = 0; id < nodes; ++id) {
    const MoteType& t = type_of(id);
    mw::NodeSpec s;
    s.node_id = id;
    s.role = role_of(id);
    s.cpi = t.cpi;
    s.cct_s = t.cct_s;
    s.phi_s = t.phi_s;
    s.p_static_w = t.p_static_w;
    s.active_gates = t.active_gates;
    s.capacitance_f = t.capacitance_f;
    s.voltage_v = t.voltage_v;
    s.frequency_hz = t.frequency_hz;
    s.beta_j_per_packet = t.beta_j_per_packet;
    s.memory_bytes = t.memory_bytes;
    s.battery_j = t.battery_j;
    specs.push_back(s);
  }
  return specs;
}

void ScenarioConfig::validate() const {
  if (nodes < 3) throw ConfigError("need at least 3 nodes (one SMN, SCN, SPN)");
  if (sim_time_s <= 0.0) throw ConfigError("sim_time_s must be positive");
  if (mobility_step_s <= 0.0) throw ConfigError("mobility_step_s must be positive");
  if (area_m <= 0.0) throw ConfigError("area_m must be positive");
  if (smn < 0 || smn >= nodes) throw ConfigError("smn id out of range");
  if (scns.empty()) throw ConfigError("at least one SCN is required");
  std::set<NodeId> consumer_set;
  for (NodeId id : scns) {
    if (id < 0 || id >= nodes) throw ConfigError("scn id out of range");
    if (id == smn) throw ConfigError("a node cannot be both SMN and SCN");
    if (!consumer_set.insert(id).second) throw ConfigError("duplicate SCN id");
  }
  if (static_cast<int>(scns.size()) + 1 >= nodes) {
    throw ConfigError("at least one SPN is required");
  }
  if (mote_types.empty()) throw ConfigError("at least one mote type is required");
  for (const auto& t : mote_types) {
    if (t.cpi <= 0.0 || t.cct_s <= 0.0) throw ConfigError("mote type needs positive CPI and CCT");
    if (t.battery_j <= 0.0) throw ConfigError("mote type needs positive battery");
  }
  if (!node_type.empty()) {
    if (static_cast<int>(node_type.size()) != nodes) {
      throw ConfigError("node_type must list one entry per node");
    }
    for (int t : node_type) {
      if (t < 0 || t >= static_cast<int>(mote_types.size())) {
        throw ConfigError("node_type index out of range");
      }
    }
  }
  if (!radio.valid()) {
    throw ConfigError("radio config invalid: power levels must increase in power and range");
  }
  if (net.packet.packet_size_bits <= net.packet.header_bits) {
    throw ConfigError("packet size must exceed header size");
  }
  if (groups.empty()) throw ConfigError("at least one mobility group is required");
  std::vector<int> seen(static_cast<std::size_t>(nodes), 0);
  for (const auto& g : groups) {
    if (g.members.empty()) throw ConfigError("empty mobility group");
    for (NodeId id : g.members) {
      if (id < 0 || id >= nodes) throw ConfigError("group member id out of range");
      ++seen[static_cast<std::size_t>(id)];
    }
    if (g.speed_mps < 0.0 || g.jitter_m < 0.0) {
      throw ConfigError("group speed and jitter must be non-negative");
    }
  }
  for (NodeId id = 0; id < nodes; ++id) {
    if (seen[static_cast<std::size_t>(id)] != 1) {
      throw ConfigError("every node must belong to exactly one mobility group");
    }
  }
  if (workload.tasks < 0) throw ConfigError("task count must be non-negative");
  if (workload.instructions_hi < workload.instructions_lo ||
      workload.input_bits_hi < workload.input_bits_lo) {
    throw ConfigError("workload ranges must satisfy hi >= lo");
  }
  if (workload.submit_end_s < workload.submit_start_s) {
    throw ConfigError("submit window must satisfy end >= start");
  }
  if (workload.submit_end_s > sim_time_s) {
    throw ConfigError("submit window must end before the simulation horizon");
  }
}

// ---------------------------------------------------------------------------
// Defaults and presets

namespace {

std::vector<MoteType> default_mote_types() {
  MoteType fast;
  fast.cpi = 1.0;
  fast.cct_s = 1e-9;
  fast.phi_s = 1e-3;
  fast.p_static_w = 0.10;
  fast.active_gates = 12.0;
  fast.capacitance_f = 1e-10;
  fast.voltage_v = 1.0;
  fast.frequency_hz = 1e9;
  fast.battery_j = 3000.0;
  fast.memory_bytes = 256LL << 20;

  MoteType mid;
  mid.cpi = 2.0;
  mid.cct_s = 2e-9;
  mid.phi_s = 1e-3;
  mid.p_static_w = 0.08;
  mid.active_gates = 8.0;
  mid.capacitance_f = 1e-10;
  mid.voltage_v = 0.9;
  mid.frequency_hz = 5e8;
  mid.battery_j = 2500.0;
  mid.memory_bytes = 192LL << 20;

  MoteType slow;
  slow.cpi = 2.0;
  slow.cct_s = 4e-9;
  slow.phi_s = 2e-3;
  slow.p_static_w = 0.06;
  slow.active_gates = 6.0;
  slow.capacitance_f = 1e-10;
  slow.voltage_v = 0.8;
  slow.frequency_hz = 2.5e8;
  slow.battery_j = 2000.0;
  slow.memory_bytes = 128LL << 20;

  return {fast, mid, slow};
}

radio::RadioConfig default_radio() {
  radio::RadioConfig r;
  // Ranges split the 180 m maximum evenly; transmit powers are calibrated to
  // a common receiver sensitivity under the n=2 log-distance model, and
  // per-packet energy scales with the square of the range.
  r.levels = {
      {10.00, 60.0, 0.667e-4},
      {16.02, 120.0, 2.67e-4},
      {19.54, 180.0, 6.0e-4},
  };
  r.interference_extra_m = 20.0;
  r.path_loss_exponent = 2.0;
  r.rx_success_ratio = 0.97;
  return r;
}

} // namespace

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.mote_types = default_mote_types();
  cfg.radio = default_radio();
  // One group covering every node unless a preset or file says otherwise.
  GroupConfig g;
  g.members.resize(static_cast<std::size_t>(cfg.nodes));
  std::iota(g.members.begin(), g.members.end(), 0);
  g.speed_mps = 1.0;
  g.jitter_m = 60.0;
  cfg.groups = {g};
  return cfg;
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig cfg = default_config();
  cfg.name = name;

  auto make_groups = [&](const std::vector<std::vector<NodeId>>& memberships, double speed,
                         double jitter, radio::Region region) {
    cfg.groups.clear();
    for (const auto& members : memberships) {
      GroupConfig g;
      g.members = members;
      g.speed_mps = speed;
      g.jitter_m = jitter;
      g.region = region;
      cfg.groups.push_back(g);
    }
  };

  if (name == "s1" || name == "s2") {
    // Four groups: the master, the consumers, and four modest providers share
    // one group; the fastest providers live in the other groups, so chasing
    // raw speed means crossing group boundaries. s1 drifts slowly in a tight
    // box; s2 roams a wide box fast enough that cross-group links keep
    // breaking.
    const bool slow = name == "s1";
    cfg.groups.clear();
    auto add_group = [&](std::vector<NodeId> members, radio::Region region) {
      GroupConfig g;
      g.members = std::move(members);
      g.speed_mps = slow ? 1.0 : 8.0;
      g.jitter_m = 30.0;
      g.region = region;
      cfg.groups.push_back(g);
    };
    if (slow) {
      // Master group in the middle, provider groups orbiting the edge of its
      // neighborhood: mostly reachable, occasionally not.
      add_group({0, 1, 2, 3, 4, 5, 6, 7}, {540.0, 540.0, 660.0, 660.0});
      add_group({8, 9, 10, 11}, {460.0, 460.0, 600.0, 600.0});
      add_group({12, 13, 14, 15}, {600.0, 460.0, 740.0, 600.0});
      add_group({16, 17, 18, 19}, {460.0, 600.0, 600.0, 740.0});
    } else {
      const radio::Region box{300.0, 300.0, 900.0, 900.0};
      add_group({0, 1, 2, 3, 4, 5, 6, 7}, box);
      add_group({8, 9, 10, 11}, box);
      add_group({12, 13, 14, 15}, box);
      add_group({16, 17, 18, 19}, box);
    }
    cfg.node_type = {1, 1, 1, 1, 1, 1, 2, 2, 0, 0, 1, 2, 0, 0, 1, 2, 0, 0, 1, 2};
    cfg.workload.instructions_lo = 1'500'000'000;
    cfg.workload.instructions_hi = 5'000'000'000;
    cfg.workload.submit_start_s = 120.0;
    cfg.workload.submit_end_s = 180.0;
    if (!slow) {
      // Encounters are brief: rediscover quickly and bucket lifetimes finely
      // so a link's age becomes informative before the encounter ends.
      cfg.net.discovery_period_s = 10.0;
      cfg.net.lifetime.short_max_s = 10.0;
      cfg.net.lifetime.medium_max_s = 60.0;
    }
    return cfg;
  }

  if (name == "s3") {
    // Static, uniformly spread deployment: every pair sits at 130 m or more,
    // so any node a node can hear at all it can hear only at the maximum
    // power level. The master holds the center; consumers and providers
    // alternate on the inner ring; the outer ring fills the area.
    const double cx = 600.0;
    const double cy = 600.0;
    std::vector<radio::Position> spots;
    spots.push_back({cx, cy}); // node 0: SMN
    const double inner_r = 130.0;
    const double outer_r = 260.0;
    std::vector<radio::Position> inner;
    inner.reserve(6);
    for (int k = 0; k < 6; ++k) {
      const double a = k * M_PI / 3.0;
      inner.push_back({cx + inner_r * std::cos(a), cy + inner_r * std::sin(a)});
    }
    // Consumers on even inner slots, providers on odd ones.
    spots.push_back(inner[0]);
    spots.push_back(inner[2]);
    spots.push_back(inner[4]);
    spots.push_back(inner[1]);
    spots.push_back(inner[3]);
    spots.push_back(inner[5]);
    for (int k = 0; k < 12; ++k) {
      const double a = k * M_PI / 6.0;
      spots.push_back({cx + outer_r * std::cos(a), cy + outer_r * std::sin(a)});
    }
    spots.push_back({cx, cy + 390.0}); // node 19, fringe
    cfg.groups.clear();
    for (NodeId id = 0; id < cfg.nodes; ++id) {
      GroupConfig g;
      g.members = {id};
      g.speed_mps = 0.0;
      g.jitter_m = 0.0;
      const auto& s = spots[static_cast<std::size_t>(id)];
      g.region = radio::Region{s.x, s.y, s.x, s.y};
      cfg.groups.push_back(g);
    }
    cfg.workload.submit_start_s = 120.0;
    cfg.workload.submit_end_s = 600.0;
    return cfg;
  }

  if (name == "s4") {
    // Clustered deployment: tight groups far apart, so in-cluster traffic
    // runs at the lowest power level while clusters cannot hear each other.
    cfg.groups.clear();
    auto cluster = [&](std::vector<NodeId> members, radio::Region region) {
      GroupConfig g;
      g.members = std::move(members);
      g.speed_mps = 0.5;
      g.jitter_m = 20.0;
      g.region = region;
      cfg.groups.push_back(g);
    };
    cluster({0, 1, 2, 3, 4, 5, 6, 7}, {150.0, 150.0, 300.0, 300.0});
    cluster({8, 9, 10, 11, 12}, {850.0, 150.0, 1000.0, 300.0});
    cluster({13, 14, 15, 16}, {150.0, 850.0, 300.0, 1000.0});
    cluster({17, 18, 19}, {850.0, 850.0, 1000.0, 1000.0});
    // Clusters barely move: probe and rediscover at a relaxed cadence, and
    // ship enough data for the power level to dominate the energy bill.
    cfg.net.discovery_period_s = 60.0;
    cfg.net.hello_period_s = 40.0;
    cfg.workload.input_bits_lo = 1'000'000;
    cfg.workload.input_bits_hi = 6'000'000;
    cfg.workload.submit_start_s = 120.0;
    cfg.workload.submit_end_s = 600.0;
    return cfg;
  }

  if (name == "default" || name == "custom") return cfg;
  throw ConfigError("unknown preset '" + name + "' (expected s1|s2|s3|s4|default)");
}

// ---------------------------------------------------------------------------
// JSON loading

namespace {

radio::Region parse_region(const json& j) {
  radio::Region r;
  if (j.is_array() && j.size() == 4) {
    r.x0 = j[0].get<double>();
    r.y0 = j[1].get<double>();
    r.x1 = j[2].get<double>();
    r.y1 = j[3].get<double>();
  }
  return r;
}

void apply_overrides(ScenarioConfig& cfg, const json& j) {
  cfg.name = j.value("name", cfg.name);
  cfg.area_m = j.value("area_m", cfg.area_m);
  cfg.sim_time_s = j.value("sim_time_s", cfg.sim_time_s);
  cfg.nodes = j.value("nodes", cfg.nodes);
  cfg.mobility_step_s = j.value("mobility_step_s", cfg.mobility_step_s);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("scheme")) cfg.scheme = parse_scheme(j["scheme"].get<std::string>());
  if (j.contains("power_mode")) cfg.power_mode = parse_power_mode(j["power_mode"].get<std::string>());

  if (j.contains("roles")) {
    const json& roles = j["roles"];
    cfg.smn = roles.value("smn", cfg.smn);
    if (roles.contains("scn")) cfg.scns = roles["scn"].get<std::vector<NodeId>>();
  }
  if (j.contains("node_type")) cfg.node_type = j["node_type"].get<std::vector<int>>();
  if (j.contains("mote_types")) {
    cfg.mote_types.clear();
    for (const auto& m : j["mote_types"]) {
      MoteType t;
      t.cpi = m.value("cpi", t.cpi);
      t.cct_s = m.value("cct_s", t.cct_s);
      t.phi_s = m.value("phi_s", t.phi_s);
      t.p_static_w = m.value("p_static_w", t.p_static_w);
      t.active_gates = m.value("active_gates", t.active_gates);
      t.capacitance_f = m.value("capacitance_f", t.capacitance_f);
      t.voltage_v = m.value("voltage_v", t.voltage_v);
      t.frequency_hz = m.value("frequency_hz", t.frequency_hz);
      t.beta_j_per_packet = m.value("beta_j_per_packet", t.beta_j_per_packet);
      t.memory_bytes = m.value("memory_bytes", t.memory_bytes);
      t.battery_j = m.value("battery_j", t.battery_j);
      cfg.mote_types.push_back(t);
    }
  }
  if (j.contains("groups")) {
    cfg.groups.clear();
    for (const auto& g : j["groups"]) {
      GroupConfig gc;
      gc.members = g.value("members", std::vector<NodeId>{});
      gc.speed_mps = g.value("speed_mps", gc.speed_mps);
      gc.jitter_m = g.value("jitter_m", gc.jitter_m);
      if (g.contains("region")) gc.region = parse_region(g["region"]);
      cfg.groups.push_back(gc);
    }
  }
  if (j.contains("radio")) {
    const json& r = j["radio"];
    if (r.contains("levels")) {
      cfg.radio.levels.clear();
      for (const auto& l : r["levels"]) {
        radio::PowerLevel level;
        level.tx_power_dbm = l.value("tx_power_dbm", 0.0);
        level.range_m = l.value("range_m", 0.0);
        level.energy_per_packet_j = l.value("energy_per_packet_j", 0.0);
        cfg.radio.levels.push_back(level);
      }
    }
    cfg.radio.interference_extra_m = r.value("interference_extra_m", cfg.radio.interference_extra_m);
    cfg.radio.path_loss_exponent = r.value("path_loss_exponent", cfg.radio.path_loss_exponent);
    cfg.radio.rx_success_ratio = r.value("rx_success_ratio", cfg.radio.rx_success_ratio);
  }
  if (j.contains("net")) {
    const json& n = j["net"];
    cfg.net.channel_bps = n.value("channel_bps", cfg.net.channel_bps);
    cfg.net.packet.packet_size_bits = n.value("packet_size_bits", cfg.net.packet.packet_size_bits);
    cfg.net.packet.header_bits = n.value("header_bits", cfg.net.packet.header_bits);
    cfg.net.discovery_period_s = n.value("discovery_period_s", cfg.net.discovery_period_s);
    cfg.net.hello_period_s = n.value("hello_period_s", cfg.net.hello_period_s);
    cfg.net.avgdl_smoothing = n.value("avgdl_smoothing", cfg.net.avgdl_smoothing);
    cfg.net.max_packet_retries = n.value("max_packet_retries", cfg.net.max_packet_retries);
    cfg.net.transfer_retry_s = n.value("transfer_retry_s", cfg.net.transfer_retry_s);
    cfg.net.transfer_timeout_s = n.value("transfer_timeout_s", cfg.net.transfer_timeout_s);
  }
  if (j.contains("lifetime")) {
    const json& l = j["lifetime"];
    cfg.net.lifetime.short_max_s = l.value("short_max_s", cfg.net.lifetime.short_max_s);
    cfg.net.lifetime.medium_max_s = l.value("medium_max_s", cfg.net.lifetime.medium_max_s);
  }
  if (j.contains("timers")) {
    const json& t = j["timers"];
    cfg.mw.timers.nim_period_s = t.value("nim_s", cfg.mw.timers.nim_period_s);
    cfg.mw.timers.missed_nim_multiplier = t.value("m", cfg.mw.timers.missed_nim_multiplier);
    cfg.mw.timers.tim_period_s = t.value("tim_s", cfg.mw.timers.tim_period_s);
    cfg.mw.timers.mim_period_s = t.value("mim_s", cfg.mw.timers.mim_period_s);
    cfg.mw.timers.nium_threshold = t.value("nium_threshold", cfg.mw.timers.nium_threshold);
    cfg.mw.timers.failure_grace_multiplier =
        t.value("failure_grace", cfg.mw.timers.failure_grace_multiplier);
  }
  if (j.contains("middleware")) {
    const json& m = j["middleware"];
    cfg.mw.allocation_tick_s = m.value("allocation_tick_s", cfg.mw.allocation_tick_s);
    cfg.mw.monitor_period_s = m.value("monitor_period_s", cfg.mw.monitor_period_s);
    cfg.mw.submit_retry_s = m.value("submit_retry_s", cfg.mw.submit_retry_s);
    cfg.mw.output_retry_s = m.value("output_retry_s", cfg.mw.output_retry_s);
    cfg.mw.max_reallocations = m.value("max_reallocations", cfg.mw.max_reallocations);
    cfg.mw.blacklist_s = m.value("blacklist_s", cfg.mw.blacklist_s);
    cfg.mw.migration_enabled = m.value("migration_enabled", cfg.mw.migration_enabled);
    cfg.mw.migration_battery_frac = m.value("migration_battery_frac", cfg.mw.migration_battery_frac);
    cfg.mw.migration_lifetime_check =
        m.value("migration_lifetime_check", cfg.mw.migration_lifetime_check);
    cfg.mw.util_low = m.value("util_low", cfg.mw.util_low);
    cfg.mw.util_high = m.value("util_high", cfg.mw.util_high);
    cfg.mw.better_node_margin = m.value("better_node_margin", cfg.mw.better_node_margin);
    cfg.mw.migration_cooldown_s = m.value("migration_cooldown_s", cfg.mw.migration_cooldown_s);
  }
  if (j.contains("workload")) {
    const json& w = j["workload"];
    cfg.workload.tasks = w.value("tasks", cfg.workload.tasks);
    cfg.workload.instructions_lo = w.value("instructions_lo", cfg.workload.instructions_lo);
    cfg.workload.instructions_hi = w.value("instructions_hi", cfg.workload.instructions_hi);
    cfg.workload.input_bits_lo = w.value("input_bits_lo", cfg.workload.input_bits_lo);
    cfg.workload.input_bits_hi = w.value("input_bits_hi", cfg.workload.input_bits_hi);
    cfg.workload.output_fraction = w.value("output_fraction", cfg.workload.output_fraction);
    cfg.workload.code_bits = w.value("code_bits", cfg.workload.code_bits);
    cfg.workload.submit_start_s = w.value("submit_start_s", cfg.workload.submit_start_s);
    cfg.workload.submit_end_s = w.value("submit_end_s", cfg.workload.submit_end_s);
  }
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig cfg =
      j.contains("preset") ? preset(j["preset"].get<std::string>()) : default_config();
  apply_overrides(cfg, j);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

} // namespace madcloud::harness
