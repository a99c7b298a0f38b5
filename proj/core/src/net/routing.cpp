#include "madcloud/net/routing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace madcloud::net {

std::int64_t packets_for(std::int64_t data_size_bits, const PacketParams& p) {
  if (p.packet_size_bits <= p.header_bits) {
    throw std::invalid_argument("packets_for: packet size must exceed header size");
  }
  if (data_size_bits < 0) {
    throw std::invalid_argument("packets_for: negative data size");
  }
  if (data_size_bits == 0) return 0;
  const auto payload = static_cast<std::int64_t>(p.packet_size_bits - p.header_bits);
  return (data_size_bits + payload - 1) / payload;
}

double available_bandwidth_bps(double b_channel_bps, std::span<const double> neighbor_self_bps) {
  double used = 0.0;
  for (double b : neighbor_self_bps) used += b;
  return std::max(0.0, b_channel_bps - used);
}

double estimate_dtt_s(std::int64_t data_size_bits, const RouteEntry& entry,
                      const PacketParams& p) {
  if (data_size_bits == 0) return 0.0;
  if (entry.link_quality_bps <= 0.0) return kInfiniteTime;
  const double pkts = static_cast<double>(packets_for(data_size_bits, p));
  return (pkts * p.packet_size_bits) / entry.link_quality_bps +
         (entry.pkts_avg_dl * p.packet_size_bits) / entry.link_quality_bps;
}

RouteEntry& RoutingTableSet::upsert(int level, const RouteEntry& entry) {
  for (int l = 0; l < level_count(); ++l) {
    if (l != level) remove(l, entry.dest_node, entry.next_node);
  }
  auto& routes = tables_[static_cast<std::size_t>(level)][entry.dest_node];
  for (auto& r : routes) {
    if (r.next_node == entry.next_node) {
      const double avg_dl = r.pkts_avg_dl; // drop statistics survive refreshes
      r = entry;
      r.power_level = level;
      r.pkts_avg_dl = avg_dl;
      return r;
    }
  }
  routes.push_back(entry);
  routes.back().power_level = level;
  return routes.back();
}

void RoutingTableSet::remove(int level, NodeId dest, NodeId next) {
  auto& table = tables_[static_cast<std::size_t>(level)];
  auto it = table.find(dest);
  if (it == table.end()) return;
  auto& routes = it->second;
  std::erase_if(routes, [&](const RouteEntry& r) { return r.next_node == next; });
  if (routes.empty()) table.erase(it);
}

void RoutingTableSet::remove_dest(NodeId dest) {
  for (auto& table : tables_) table.erase(dest);
}

const std::vector<RouteEntry>* RoutingTableSet::routes(int level, NodeId dest) const {
  const auto& table = tables_[static_cast<std::size_t>(level)];
  auto it = table.find(dest);
  return it == table.end() ? nullptr : &it->second;
}

std::vector<RouteEntry>* RoutingTableSet::routes_mut(int level, NodeId dest) {
  auto& table = tables_[static_cast<std::size_t>(level)];
  auto it = table.find(dest);
  return it == table.end() ? nullptr : &it->second;
}

bool RoutingTableSet::contains(NodeId dest) const {
  for (const auto& table : tables_) {
    if (table.contains(dest)) return true;
  }
  return false;
}

std::optional<RouteSelection> select_route(NodeId dest, std::int64_t data_size_bits,
                                           const RoutingTableSet& tables,
                                           const PacketParams& params) {
  // Among routes whose predicted lifetime covers the estimated transfer time,
  // minimize the transfer time; ties go to the higher lifetime probability,
  // then the lower power level, then table order. The walk starts at the
  // lowest power table, so "first qualifying" is also "lowest level".
  std::optional<RouteSelection> best;
  double best_dtt = kInfiniteTime;
  double best_p = 0.0;
  for (int level = 0; level < tables.level_count(); ++level) {
    const auto* routes = tables.routes(level, dest);
    if (!routes) continue;
    for (const auto& entry : *routes) {
      const double dtt = estimate_dtt_s(data_size_bits, entry, params);
      if (entry.predicted_lifetime_s < dtt) continue;
      const bool better =
          dtt < best_dtt || (dtt == best_dtt && entry.lifetime_probability > best_p);
      if (better) {
        best = RouteSelection{entry, dtt, false};
        best_dtt = dtt;
        best_p = entry.lifetime_probability;
      }
    }
  }
  if (best) return best;

  // Nothing qualified: longest-lived route at the lowest level that knows the
  // destination, flagged as a fallback.
  for (int level = 0; level < tables.level_count(); ++level) {
    const auto* routes = tables.routes(level, dest);
    if (!routes || routes->empty()) continue;
    const RouteEntry* pick = &(*routes)[0];
    for (const auto& entry : *routes) {
      if (entry.predicted_lifetime_s > pick->predicted_lifetime_s) pick = &entry;
    }
    return RouteSelection{*pick, estimate_dtt_s(data_size_bits, *pick, params), true};
  }
  return std::nullopt;
}

} // namespace madcloud::net
