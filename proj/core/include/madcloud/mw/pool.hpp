#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "madcloud/mw/model.hpp"
#include "madcloud/types.hpp"

namespace madcloud::mw {

// One cloud member as known to a node, fed entirely by received messages.
struct ResourcePoolEntry {
  NodeId node_id = kNoNode;
  double cpi = 0.0;
  double cct_s = 0.0;
  double queue_waiting_time_s = 0.0;
  std::int64_t memory_available_bytes = 0;
  double battery_available_j = 0.0;
  // Local aging applied after dispatch decisions, drained linearly until the
  // next real update message overwrites it.
  double queue_bump_s = 0.0;
  double queue_bump_at = 0.0;
  // Last network-level view of the member (routing table snapshot).
  int power_level = 0;
  double link_quality_bps = 0.0;
  double link_lifetime_s = 0.0;
  double pkts_avg_dl = 0.0;
  double last_nim_at = -std::numeric_limits<double>::infinity();
  bool available = false;
  bool has_dynamic = false;

  bool fresh(double now, const ProtocolTimers& t) const {
    return now - last_nim_at <= t.missed_nim_multiplier * t.nim_period_s;
  }

  double effective_queue_time_s(double now) const {
    const double residual = queue_bump_s - (now - queue_bump_at);
    return queue_waiting_time_s + std::max(0.0, residual);
  }

  void add_queue_bump(double now, double seconds) {
    const double residual = std::max(0.0, queue_bump_s - (now - queue_bump_at));
    queue_bump_s = residual + seconds;
    queue_bump_at = now;
  }
};

class ResourcePool {
public:
  bool contains(NodeId id) const { return entries_.contains(id); }

  ResourcePoolEntry& upsert(NodeId id) {
    auto& e = entries_[id];
    e.node_id = id;
    return e;
  }

  ResourcePoolEntry* find(NodeId id) {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const ResourcePoolEntry* find(NodeId id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Marks entries whose NIMs stopped arriving as unavailable and refreshes
  // the flag of those that recovered. Returns the newly evicted ids.
  std::vector<NodeId> evict_stale(double now, const ProtocolTimers& timers) {
    std::vector<NodeId> evicted;
    for (auto& [id, e] : entries_) {
      const bool fresh = e.fresh(now, timers);
      if (e.available && !fresh) evicted.push_back(id);
      e.available = fresh;
    }
    return evicted;
  }

  std::map<NodeId, ResourcePoolEntry>& entries() { return entries_; }
  const std::map<NodeId, ResourcePoolEntry>& entries() const { return entries_; }

private:
  std::map<NodeId, ResourcePoolEntry> entries_;
};

} // namespace madcloud::mw
