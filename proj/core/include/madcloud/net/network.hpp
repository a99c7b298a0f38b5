#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "madcloud/mw/messages.hpp"
#include "madcloud/net/lifetime.hpp"
#include "madcloud/net/routing.hpp"
#include "madcloud/radio/mobility.hpp"
#include "madcloud/radio/radio.hpp"
#include "madcloud/sim/engine.hpp"
#include "madcloud/sim/rng.hpp"
#include "madcloud/sim/trace.hpp"
#include "madcloud/types.hpp"

namespace madcloud::net {

struct NetConfig {
  double channel_bps = 11e6; // 802.11b
  PacketParams packet;
  double discovery_period_s = 30.0;
  double hello_period_s = 20.0;
  double avgdl_smoothing = 0.2; // EWMA weight for dropped+lost packets
  int max_packet_retries = 5;   // consecutive losses before a transfer dies
  double transfer_retry_s = 0.5;
  double loss_backoff_s = 0.5; // added per consecutive loss past the first
  double transfer_timeout_s = 120.0;
  LifetimeBoundaries lifetime;
};

// Up/down state and lifetime history per (node pair, power level). Link state
// follows mobility-driven reachability, so lifetimes are emergent.
class LinkTracker {
public:
  LinkTracker(int node_count, int level_count, LifetimeBoundaries boundaries);

  // Re-evaluates every pair against current positions. Completed up-periods
  // feed the per-link Markov models. Calls on_down(a, b, level) for each link
  // that just dropped.
  void update(const std::vector<radio::Position>& positions, const radio::RadioConfig& radio,
              const std::function<bool(NodeId)>& alive, double now,
              const std::function<void(NodeId, NodeId, int)>& on_down);

  bool up(NodeId a, NodeId b, int level) const;
  double up_since(NodeId a, NodeId b, int level) const;

  // Prediction for a live link: the current up-period's elapsed duration
  // selects the matrix row.
  LifetimePrediction predict(NodeId a, NodeId b, int level, double now) const;

  const LinkLifetimeModel& model(NodeId a, NodeId b, int level) const;
  LinkLifetimeModel& model_mut(NodeId a, NodeId b, int level);

private:
  struct State {
    bool up = false;
    double up_since = 0.0;
    LinkLifetimeModel model;
  };

  std::size_t index(NodeId a, NodeId b, int level) const;

  int node_count_;
  int level_count_;
  LifetimeBoundaries boundaries_;
  std::vector<State> links_;
};

struct TransferOutcome {
  bool success = false;
  double elapsed_s = 0.0;
  double energy_j = 0.0;
  std::int64_t packets_sent = 0; // transmissions, including retries
  std::int64_t packets_lost = 0;
  int level = 0;
};

// The simulated network layer: power-controlled discovery, per-level routing
// tables, per-level maintenance probes, and the packet-by-packet data plane
// with energy accounting. Non-network control messages are handed to the
// middleware through the message handler.
class Network {
public:
  struct Params {
    int node_count = 0;
    radio::RadioConfig radio;
    NetConfig cfg;
    bool use_routing = true; // false: network-oblivious scheme, direct at max power
    bool multi_power = true; // false: control plane at max power only
  };

  using MessageHandler =
      std::function<void(NodeId receiver, const mw::ControlMessage& msg, double rssi_dbm)>;
  using TransferCallback = std::function<void(const TransferOutcome&)>;

  Network(sim::Engine& engine, radio::MobilityModel& mobility, sim::RngStream& loss_rng,
          sim::Trace& trace, Params params);

  void set_message_handler(MessageHandler handler) { handler_ = std::move(handler); }
  void set_alive_fn(std::function<bool(NodeId)> fn) { alive_ = std::move(fn); }
  void set_energy_sink(std::function<void(NodeId, double)> fn) { energy_sink_ = std::move(fn); }

  // Schedules the periodic discovery rounds and per-level probes.
  void start();

  // Control plane -----------------------------------------------------------

  void broadcast(NodeId src, int level, const mw::ControlMessage& msg);
  // Routed when tables know the destination, otherwise a blind direct send at
  // maximum power.
  void unicast(NodeId src, NodeId dst, const mw::ControlMessage& msg);
  // Direct send at a specific level (replies to a packet whose distance is
  // known from its RSSI).
  void send_direct(NodeId src, NodeId dst, int level, const mw::ControlMessage& msg);

  void start_discovery(NodeId origin);

  // Reply level for a peer whose packet was received with this RSSI.
  std::optional<int> reply_level(double tx_power_dbm, double rssi_dbm) const;

  // Data plane --------------------------------------------------------------

  // Moves `bits` from src to dst packet by packet. Proposed schemes pick the
  // route from the tables (failing when none); network-oblivious schemes send
  // directly at maximum power.
  void transfer(NodeId src, NodeId dst, std::int64_t bits, const char* label,
                TransferCallback done);

  // Queries -----------------------------------------------------------------

  // Eq.-2 link quality from src toward a neighbor: channel bandwidth minus
  // the neighbors' current self-traffic.
  double link_quality_bps(NodeId m) const;
  // Refreshes link quality and lifetime prediction on owner's entries for
  // dest, then runs route selection.
  std::optional<RouteSelection> select(NodeId owner, NodeId dest, std::int64_t bits);
  void refresh_entries(NodeId owner, NodeId dest);

  RoutingTableSet& tables(NodeId owner) { return nodes_[static_cast<std::size_t>(owner)].tables; }
  LinkTracker& link_tracker() { return tracker_; }
  const Params& params() const { return params_; }

  // Ground-truth adjacency at maximum power (hop counts for the MinHop
  // baseline).
  std::vector<std::vector<NodeId>> max_power_adjacency() const;

  // Called after every mobility advance: updates link state and prunes
  // routing entries whose link dropped.
  void on_mobility_step();

  // Counters ----------------------------------------------------------------
  std::int64_t control_packets() const { return control_packets_; }
  std::int64_t data_packets() const { return data_packets_; }
  double tx_energy_j() const { return tx_energy_j_; }

private:
  struct NodeNet {
    RoutingTableSet tables;
    double self_traffic_bps = 0.0;
    std::uint32_t broadcast_seq = 0;
  };

  struct Transfer {
    NodeId src = kNoNode;
    NodeId dst = kNoNode;
    int level = 0;
    std::int64_t bits = 0;
    const char* label = "data";
    std::int64_t packets_total = 0;
    std::int64_t packets_delivered = 0;
    std::int64_t packets_lost = 0;
    std::int64_t transmissions = 0;
    double energy_j = 0.0;
    double rate_bps = 0.0;
    double started_at = 0.0;
    int consecutive_losses = 0;
    bool reserved = false;
    TransferCallback done;
  };

  bool alive(NodeId n) const { return !alive_ || alive_(n); }
  int effective_level(int level) const {
    return params_.multi_power ? level : params_.radio.max_level();
  }
  double control_tx_delay_s(std::int64_t packets) const;
  double charge_packet(NodeId src, int level); // energy accounting, returns joules
  void handle_network_message(NodeId receiver, const mw::ControlMessage& msg, double rssi_dbm);
  void deliver(NodeId receiver, mw::ControlMessage msg, double rssi_dbm);

  void send_packets(NodeId src, NodeId dst, int level, const mw::ControlMessage& msg,
                    bool is_broadcast);

  void transfer_try_start(std::uint64_t id);
  void transfer_packet_end(std::uint64_t id);
  void transfer_finish(std::uint64_t id, bool success);
  void update_avg_dl(const Transfer& t);

  sim::Engine& engine_;
  radio::MobilityModel& mobility_;
  sim::RngStream& loss_rng_;
  sim::Trace& trace_;
  Params params_;
  MessageHandler handler_;
  std::function<bool(NodeId)> alive_;
  std::function<void(NodeId, double)> energy_sink_;

  std::vector<NodeNet> nodes_;
  LinkTracker tracker_;
  std::map<std::uint64_t, Transfer> transfers_;
  std::uint64_t next_transfer_id_ = 0;

  std::int64_t control_packets_ = 0;
  std::int64_t data_packets_ = 0;
  double tx_energy_j_ = 0.0;
};

} // namespace madcloud::net
