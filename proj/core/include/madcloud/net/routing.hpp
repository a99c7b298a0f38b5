#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "madcloud/types.hpp"

namespace madcloud::net {

struct PacketParams {
  double packet_size_bits = 4096.0; // 512 bytes
  double header_bits = 256.0;
};

// Number of packets needed for a payload: ceil(data / (packet - header)).
std::int64_t packets_for(std::int64_t data_size_bits, const PacketParams& p);

// Available bandwidth seen by the sending node: channel bandwidth minus the
// self-traffic of its neighbors, floored at zero.
double available_bandwidth_bps(double b_channel_bps, std::span<const double> neighbor_self_bps);

struct RouteEntry {
  NodeId next_node = kNoNode;
  NodeId dest_node = kNoNode;
  int power_level = 0;
  double pkts_avg_dl = 0.0; // smoothed dropped+lost packets per transfer
  double link_quality_bps = 0.0;
  double predicted_lifetime_s = 0.0;
  double lifetime_probability = 0.0;
};

// Transfer-time estimate for a route: payload packets plus the expected
// retransmissions, all serialized at the link quality. Unusable (zero
// quality) routes estimate to infinity.
double estimate_dtt_s(std::int64_t data_size_bits, const RouteEntry& entry,
                      const PacketParams& p);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// One routing table per transmission power level; tables are indexed in
// increasing power order and an entry in table i means the destination was
// discovered reachable at level i.
class RoutingTableSet {
public:
  explicit RoutingTableSet(int level_count = 0) : tables_(static_cast<std::size_t>(level_count)) {}

  int level_count() const { return static_cast<int>(tables_.size()); }

  // Inserts or refreshes the (dest, next) entry at `level` and drops the pair
  // from every other level, mirroring a changed discovery reply.
  RouteEntry& upsert(int level, const RouteEntry& entry);

  void remove(int level, NodeId dest, NodeId next);
  void remove_dest(NodeId dest);

  const std::vector<RouteEntry>* routes(int level, NodeId dest) const;
  std::vector<RouteEntry>* routes_mut(int level, NodeId dest);

  const std::map<NodeId, std::vector<RouteEntry>>& table(int level) const {
    return tables_[static_cast<std::size_t>(level)];
  }

  bool contains(NodeId dest) const;

private:
  std::vector<std::map<NodeId, std::vector<RouteEntry>>> tables_;
};

struct RouteSelection {
  RouteEntry entry;
  double estimated_dtt_s = 0.0;
  bool fallback = false;
};

// Route choice for one transfer. Walks the tables from the lowest power level
// up; among routes whose predicted lifetime covers the estimated transfer
// time it minimizes the transfer time, breaking ties toward the higher
// lifetime probability and then the lower power level. When nothing
// qualifies, falls back to the longest-lived route at the lowest level
// holding the destination. Entries are read as stored; callers refresh link
// quality and lifetime fields first.
std::optional<RouteSelection> select_route(NodeId dest, std::int64_t data_size_bits,
                                           const RoutingTableSet& tables,
                                           const PacketParams& params);

} // namespace madcloud::net
