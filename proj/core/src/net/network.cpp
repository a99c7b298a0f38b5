#include "madcloud/net/network.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace madcloud::net {

// ---------------------------------------------------------------------------
// LinkTracker

LinkTracker::LinkTracker(int node_count, int level_count, LifetimeBoundaries boundaries)
    : node_count_(node_count), level_count_(level_count), boundaries_(boundaries) {
  const auto pairs = static_cast<std::size_t>(node_count) * static_cast<std::size_t>(node_count);
  links_.resize(pairs * static_cast<std::size_t>(level_count), State{false, 0.0, LinkLifetimeModel(boundaries)});
}

std::size_t LinkTracker::index(NodeId a, NodeId b, int level) const {
  if (a > b) std::swap(a, b);
  return (static_cast<std::size_t>(a) * static_cast<std::size_t>(node_count_) +
          static_cast<std::size_t>(b)) *
             static_cast<std::size_t>(level_count_) +
         static_cast<std::size_t>(level);
}

void LinkTracker::update(const std::vector<radio::Position>& positions,
                         const radio::RadioConfig& radio, const std::function<bool(NodeId)>& alive,
                         double now, const std::function<void(NodeId, NodeId, int)>& on_down) {
  for (NodeId a = 0; a < node_count_; ++a) {
    for (NodeId b = a + 1; b < node_count_; ++b) {
      const bool both_alive = (!alive || (alive(a) && alive(b)));
      const double d = radio::distance(positions[static_cast<std::size_t>(a)],
                                       positions[static_cast<std::size_t>(b)]);
      for (int level = 0; level < level_count_; ++level) {
        State& st = links_[index(a, b, level)];
        const bool now_up =
            both_alive && d <= radio.levels[static_cast<std::size_t>(level)].range_m;
        if (st.up && !now_up) {
          st.model.record_transition(now - st.up_since);
          st.up = false;
          if (on_down) on_down(a, b, level);
        } else if (!st.up && now_up) {
          st.up = true;
          st.up_since = now;
        }
      }
    }
  }
}

bool LinkTracker::up(NodeId a, NodeId b, int level) const { return links_[index(a, b, level)].up; }

double LinkTracker::up_since(NodeId a, NodeId b, int level) const {
  return links_[index(a, b, level)].up_since;
}

LifetimePrediction LinkTracker::predict(NodeId a, NodeId b, int level, double now) const {
  const State& st = links_[index(a, b, level)];
  const LifetimeInterval current = classify_lifetime(now - st.up_since, boundaries_);
  return st.model.predict(current);
}

const LinkLifetimeModel& LinkTracker::model(NodeId a, NodeId b, int level) const {
  return links_[index(a, b, level)].model;
}

LinkLifetimeModel& LinkTracker::model_mut(NodeId a, NodeId b, int level) {
  return links_[index(a, b, level)].model;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(sim::Engine& engine, radio::MobilityModel& mobility, sim::RngStream& loss_rng,
                 sim::Trace& trace, Params params)
    : engine_(engine),
      mobility_(mobility),
      loss_rng_(loss_rng),
      trace_(trace),
      params_(std::move(params)),
      nodes_(static_cast<std::size_t>(params_.node_count),
             NodeNet{RoutingTableSet(static_cast<int>(params_.radio.levels.size())), 0.0, 0}),
      tracker_(params_.node_count, static_cast<int>(params_.radio.levels.size()),
               params_.cfg.lifetime) {}

double Network::control_tx_delay_s(std::int64_t packets) const {
  return static_cast<double>(packets) * params_.cfg.packet.packet_size_bits /
         params_.cfg.channel_bps;
}

double Network::charge_packet(NodeId src, int level) {
  const double joules = params_.radio.levels[static_cast<std::size_t>(level)].energy_per_packet_j;
  tx_energy_j_ += joules;
  if (energy_sink_) energy_sink_(src, joules);
  return joules;
}

void Network::start() {
  if (!params_.use_routing) return;
  const int n = params_.node_count;
  for (NodeId node = 0; node < n; ++node) {
    const double disc_offset =
        params_.cfg.discovery_period_s * (static_cast<double>(node) + 1.0) / (n + 1.0);
    auto discovery_tick = [this, node](auto&& self) -> void {
      if (alive(node)) start_discovery(node);
      engine_.schedule(engine_.now() + params_.cfg.discovery_period_s, sim::EventKind::Timer,
                       [self]() { self(self); });
    };
    engine_.schedule(engine_.now() + disc_offset, sim::EventKind::Timer,
                     [discovery_tick]() { discovery_tick(discovery_tick); });

    const double hello_offset =
        params_.cfg.hello_period_s * (static_cast<double>(node) + 1.0) / (n + 1.0);
    auto hello_tick = [this, node](auto&& self) -> void {
      if (alive(node)) {
        if (params_.multi_power) {
          for (int level = 0; level <= params_.radio.max_level(); ++level) {
            broadcast(node, level, mw::Hello{node, level});
          }
        } else {
          broadcast(node, params_.radio.max_level(), mw::Hello{node, params_.radio.max_level()});
        }
      }
      engine_.schedule(engine_.now() + params_.cfg.hello_period_s, sim::EventKind::Timer,
                       [self]() { self(self); });
    };
    engine_.schedule(engine_.now() + hello_offset, sim::EventKind::Timer,
                     [hello_tick]() { hello_tick(hello_tick); });
  }
}

void Network::send_packets(NodeId src, NodeId dst, int level, const mw::ControlMessage& msg,
                           bool is_broadcast) {
  if (!alive(src)) return;
  const std::int64_t bits = static_cast<std::int64_t>(wire_size_bytes(msg)) * 8;
  const std::int64_t packets = std::max<std::int64_t>(1, packets_for(bits, params_.cfg.packet));
  const double delay = control_tx_delay_s(packets);
  const auto& pos = mobility_.positions();
  const double n_exp = params_.radio.path_loss_exponent;
  const double tx_dbm = params_.radio.levels[static_cast<std::size_t>(level)].tx_power_dbm;

  if (is_broadcast) {
    double energy = 0.0;
    for (std::int64_t p = 0; p < packets; ++p) energy += charge_packet(src, level);
    control_packets_ += packets;
    trace_.packet({engine_.now(), src, kNoNode, level, true, type_name(msg),
                   sim::PacketOutcome::Broadcast, energy, bits});
    for (NodeId r = 0; r < params_.node_count; ++r) {
      if (r == src || !alive(r)) continue;
      const double d = radio::distance(pos[static_cast<std::size_t>(src)],
                                       pos[static_cast<std::size_t>(r)]);
      bool all_delivered = true;
      for (std::int64_t p = 0; p < packets; ++p) {
        if (radio::deliverable(d, level, params_.radio, loss_rng_) != radio::Delivery::Delivered) {
          all_delivered = false;
        }
      }
      if (d > params_.radio.levels[static_cast<std::size_t>(level)].range_m) continue;
      if (!all_delivered) continue;
      const double rssi = radio::rssi_dbm(tx_dbm, d, n_exp);
      engine_.schedule(engine_.now() + delay, sim::EventKind::MessageDelivery,
                       [this, r, msg, rssi]() { deliver(r, msg, rssi); });
    }
    return;
  }

  // Unicast: outcomes drawn at send time, one trace record per packet.
  const double d =
      radio::distance(pos[static_cast<std::size_t>(src)], pos[static_cast<std::size_t>(dst)]);
  bool all_delivered = alive(dst);
  double energy_total = 0.0;
  for (std::int64_t p = 0; p < packets; ++p) {
    const auto outcome = radio::deliverable(d, level, params_.radio, loss_rng_);
    const double joules = charge_packet(src, level);
    energy_total += joules;
    ++control_packets_;
    sim::PacketOutcome rec = sim::PacketOutcome::Delivered;
    if (outcome == radio::Delivery::Lost) {
      rec = d <= params_.radio.levels[static_cast<std::size_t>(level)].range_m
                ? sim::PacketOutcome::Lost
                : sim::PacketOutcome::Interference;
      all_delivered = false;
    } else if (outcome == radio::Delivery::OutOfRange) {
      rec = sim::PacketOutcome::OutOfRange;
      all_delivered = false;
    }
    trace_.packet({engine_.now(), src, dst, level, true, type_name(msg), rec, joules,
                   bits / packets});
  }
  (void)energy_total;
  if (!all_delivered) return;
  const double rssi = radio::rssi_dbm(tx_dbm, d, n_exp);
  engine_.schedule(engine_.now() + delay, sim::EventKind::MessageDelivery,
                   [this, dst, msg, rssi]() { deliver(dst, msg, rssi); });
}

void Network::broadcast(NodeId src, int level, const mw::ControlMessage& msg) {
  send_packets(src, kNoNode, level, msg, true);
}

void Network::send_direct(NodeId src, NodeId dst, int level, const mw::ControlMessage& msg) {
  send_packets(src, dst, level, msg, false);
}

void Network::unicast(NodeId src, NodeId dst, const mw::ControlMessage& msg) {
  int level = params_.radio.max_level();
  if (params_.use_routing) {
    const std::int64_t bits = static_cast<std::int64_t>(wire_size_bytes(msg)) * 8;
    if (auto sel = select(src, dst, bits)) {
      level = sel->entry.power_level;
    }
  }
  send_packets(src, dst, level, msg, false);
}

void Network::start_discovery(NodeId origin) {
  auto& node = nodes_[static_cast<std::size_t>(origin)];
  const int max = params_.radio.max_level();
  broadcast(origin, max,
            mw::DiscoveryRequest{origin,
                                 params_.radio.levels[static_cast<std::size_t>(max)].tx_power_dbm,
                                 node.broadcast_seq++});
}

std::optional<int> Network::reply_level(double tx_power_dbm, double rssi_dbm) const {
  const double d =
      radio::estimate_distance_m(tx_power_dbm, rssi_dbm, params_.radio.path_loss_exponent);
  auto level = radio::min_power_level(d, params_.radio);
  if (!level) return std::nullopt;
  return effective_level(*level);
}

void Network::deliver(NodeId receiver, mw::ControlMessage msg, double rssi_dbm) {
  if (!alive(receiver)) return;
  if (std::holds_alternative<mw::DiscoveryRequest>(msg) ||
      std::holds_alternative<mw::DiscoveryReply>(msg) || std::holds_alternative<mw::Hello>(msg)) {
    handle_network_message(receiver, msg, rssi_dbm);
    return;
  }
  if (handler_) handler_(receiver, msg, rssi_dbm);
}

void Network::handle_network_message(NodeId receiver, const mw::ControlMessage& msg,
                                     double rssi_dbm) {
  if (const auto* req = std::get_if<mw::DiscoveryRequest>(&msg)) {
    // Reply at the lowest level that reaches the requester (Eq.-1 distance).
    const auto level = reply_level(req->tx_power_dbm, rssi_dbm);
    if (!level) return;
    send_direct(receiver, req->src, *level, mw::DiscoveryReply{receiver, req->src, *level});
    return;
  }
  if (const auto* rep = std::get_if<mw::DiscoveryReply>(&msg)) {
    RouteEntry entry;
    entry.next_node = rep->src;
    entry.dest_node = rep->src;
    entry.power_level = rep->selected_level;
    auto& stored =
        nodes_[static_cast<std::size_t>(receiver)].tables.upsert(rep->selected_level, entry);
    (void)stored;
    refresh_entries(receiver, rep->src);
    return;
  }
  // Hello probes keep the per-level control plane alive; no state changes.
}

// ---------------------------------------------------------------------------
// Data plane

void Network::transfer(NodeId src, NodeId dst, std::int64_t bits, const char* label,
                       TransferCallback done) {
  const std::uint64_t id = next_transfer_id_++;
  Transfer t;
  t.src = src;
  t.dst = dst;
  t.bits = bits;
  t.label = label;
  t.done = std::move(done);
  t.started_at = engine_.now();

  if (bits == 0) {
    engine_.schedule(engine_.now(), sim::EventKind::MessageDelivery, [done = t.done]() {
      done(TransferOutcome{true, 0.0, 0.0, 0, 0, 0});
    });
    return;
  }
  t.packets_total = packets_for(bits, params_.cfg.packet);

  if (params_.use_routing) {
    auto sel = select(src, dst, bits);
    if (!sel) {
      engine_.schedule(engine_.now(), sim::EventKind::MessageDelivery, [done = t.done]() {
        done(TransferOutcome{false, 0.0, 0.0, 0, 0, 0});
      });
      return;
    }
    t.level = sel->entry.power_level;
  } else {
    t.level = params_.radio.max_level();
  }

  transfers_.emplace(id, std::move(t));
  transfer_try_start(id);
}

void Network::transfer_try_start(std::uint64_t id) {
  auto it = transfers_.find(id);
  if (it == transfers_.end()) return;
  Transfer& t = it->second;
  if (!alive(t.src) || !alive(t.dst)) {
    transfer_finish(id, false);
    return;
  }
  if (engine_.now() - t.started_at > params_.cfg.transfer_timeout_s) {
    transfer_finish(id, false);
    return;
  }
  const double lq = link_quality_bps(t.src);
  if (lq <= 0.0) {
    engine_.schedule(engine_.now() + params_.cfg.transfer_retry_s, sim::EventKind::Timer,
                     [this, id]() { transfer_try_start(id); });
    return;
  }
  t.rate_bps = lq;
  nodes_[static_cast<std::size_t>(t.src)].self_traffic_bps += lq;
  nodes_[static_cast<std::size_t>(t.dst)].self_traffic_bps += lq;
  t.reserved = true;
  engine_.schedule(engine_.now() + params_.cfg.packet.packet_size_bits / t.rate_bps,
                   sim::EventKind::MessageDelivery, [this, id]() { transfer_packet_end(id); });
}

void Network::transfer_packet_end(std::uint64_t id) {
  auto it = transfers_.find(id);
  if (it == transfers_.end()) return;
  Transfer& t = it->second;
  if (!alive(t.src) || !alive(t.dst)) {
    transfer_finish(id, false);
    return;
  }
  const auto& pos = mobility_.positions();
  const double d = radio::distance(pos[static_cast<std::size_t>(t.src)],
                                   pos[static_cast<std::size_t>(t.dst)]);
  const auto outcome = radio::deliverable(d, t.level, params_.radio, loss_rng_);
  const double joules = charge_packet(t.src, t.level);
  ++data_packets_;
  ++t.transmissions;
  t.energy_j += joules;

  sim::PacketOutcome rec;
  switch (outcome) {
    case radio::Delivery::Delivered: rec = sim::PacketOutcome::Delivered; break;
    case radio::Delivery::Lost:
      rec = d <= params_.radio.levels[static_cast<std::size_t>(t.level)].range_m
                ? sim::PacketOutcome::Lost
                : sim::PacketOutcome::Interference;
      break;
    default: rec = sim::PacketOutcome::OutOfRange; break;
  }
  trace_.packet({engine_.now(), t.src, t.dst, t.level, false, t.label, rec, joules,
                 static_cast<std::int64_t>(params_.cfg.packet.packet_size_bits)});

  // The sender cannot tell a lossy link from a gone peer; both walk the same
  // escalating retry ladder until the retry budget runs out.
  double backoff = 0.0;
  if (outcome == radio::Delivery::Delivered) {
    ++t.packets_delivered;
    t.consecutive_losses = 0;
    if (t.packets_delivered >= t.packets_total) {
      transfer_finish(id, true);
      return;
    }
  } else {
    ++t.packets_lost;
    if (++t.consecutive_losses > params_.cfg.max_packet_retries) {
      transfer_finish(id, false);
      return;
    }
    if (t.consecutive_losses >= 2) {
      backoff = params_.cfg.loss_backoff_s * (t.consecutive_losses - 1);
    }
  }
  if (engine_.now() - t.started_at > params_.cfg.transfer_timeout_s) {
    transfer_finish(id, false);
    return;
  }
  engine_.schedule(engine_.now() + backoff + params_.cfg.packet.packet_size_bits / t.rate_bps,
                   sim::EventKind::MessageDelivery, [this, id]() { transfer_packet_end(id); });
}

void Network::update_avg_dl(const Transfer& t) {
  if (!params_.use_routing) return;
  auto* routes = nodes_[static_cast<std::size_t>(t.src)].tables.routes_mut(t.level, t.dst);
  if (!routes) return;
  for (auto& entry : *routes) {
    if (entry.next_node == t.dst) {
      const double w = params_.cfg.avgdl_smoothing;
      entry.pkts_avg_dl = (1.0 - w) * entry.pkts_avg_dl + w * static_cast<double>(t.packets_lost);
    }
  }
}

void Network::transfer_finish(std::uint64_t id, bool success) {
  auto it = transfers_.find(id);
  if (it == transfers_.end()) return;
  Transfer t = std::move(it->second);
  transfers_.erase(it);
  if (t.reserved) {
    nodes_[static_cast<std::size_t>(t.src)].self_traffic_bps -= t.rate_bps;
    nodes_[static_cast<std::size_t>(t.dst)].self_traffic_bps -= t.rate_bps;
  }
  update_avg_dl(t);
  TransferOutcome out;
  out.success = success;
  out.elapsed_s = engine_.now() - t.started_at;
  out.energy_j = t.energy_j;
  out.packets_sent = t.transmissions;
  out.packets_lost = t.packets_lost;
  out.level = t.level;
  if (t.done) t.done(out);
}

// ---------------------------------------------------------------------------
// Queries

double Network::link_quality_bps(NodeId m) const {
  const auto& pos = mobility_.positions();
  const double max_range = params_.radio.max_range_m();
  double used = 0.0;
  for (NodeId j = 0; j < params_.node_count; ++j) {
    if (j == m || !alive(j)) continue;
    if (radio::distance(pos[static_cast<std::size_t>(m)], pos[static_cast<std::size_t>(j)]) <=
        max_range) {
      used += nodes_[static_cast<std::size_t>(j)].self_traffic_bps;
    }
  }
  return std::max(0.0, params_.cfg.channel_bps - used);
}

void Network::refresh_entries(NodeId owner, NodeId dest) {
  auto& tables = nodes_[static_cast<std::size_t>(owner)].tables;
  const double lq = link_quality_bps(owner);
  for (int level = 0; level < tables.level_count(); ++level) {
    auto* routes = tables.routes_mut(level, dest);
    if (!routes) continue;
    for (auto& entry : *routes) {
      entry.link_quality_bps = lq;
      if (tracker_.up(owner, entry.next_node, level)) {
        const auto pred = tracker_.predict(owner, entry.next_node, level, engine_.now());
        entry.predicted_lifetime_s = pred.lifetime_s;
        entry.lifetime_probability = pred.probability;
      } else {
        entry.predicted_lifetime_s = 0.0;
        entry.lifetime_probability = 0.0;
      }
    }
  }
}

std::optional<RouteSelection> Network::select(NodeId owner, NodeId dest, std::int64_t bits) {
  refresh_entries(owner, dest);
  return select_route(dest, bits, nodes_[static_cast<std::size_t>(owner)].tables,
                      params_.cfg.packet);
}

std::vector<std::vector<NodeId>> Network::max_power_adjacency() const {
  const auto& pos = mobility_.positions();
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(params_.node_count));
  const double range = params_.radio.max_range_m();
  for (NodeId a = 0; a < params_.node_count; ++a) {
    if (!alive(a)) continue;
    for (NodeId b = a + 1; b < params_.node_count; ++b) {
      if (!alive(b)) continue;
      if (radio::distance(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]) <=
          range) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
      }
    }
  }
  return adj;
}

void Network::on_mobility_step() {
  tracker_.update(mobility_.positions(), params_.radio, alive_, engine_.now(),
                  [this](NodeId a, NodeId b, int level) {
                    nodes_[static_cast<std::size_t>(a)].tables.remove(level, b, b);
                    nodes_[static_cast<std::size_t>(b)].tables.remove(level, a, a);
                  });
}

} // namespace madcloud::net
