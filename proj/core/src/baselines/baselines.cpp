#include "madcloud/baselines/baselines.hpp"

#include <deque>

namespace madcloud::baselines {

std::optional<NodeId> hta_allocate(std::span<const HtaCandidate> candidates) {
  const HtaCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!best) {
      best = &c;
      continue;
    }
    const double speed = 1.0 / (c.cpi * c.cct_s);
    const double best_speed = 1.0 / (best->cpi * best->cct_s);
    if (speed > best_speed) {
      best = &c;
    } else if (speed == best_speed) {
      if (c.battery_j > best->battery_j ||
          (c.battery_j == best->battery_j && c.id < best->id)) {
        best = &c;
      }
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::optional<NodeId> minhop_allocate(std::span<const MinHopCandidate> candidates) {
  const MinHopCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (c.hops < 0) continue; // unreachable
    if (!best || c.hops < best->hops || (c.hops == best->hops && c.id < best->id)) {
      best = &c;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::vector<int> hop_counts(const std::vector<std::vector<NodeId>>& adjacency, NodeId from) {
  std::vector<int> hops(adjacency.size(), -1);
  if (from < 0 || static_cast<std::size_t>(from) >= adjacency.size()) return hops;
  std::deque<NodeId> frontier{from};
  hops[static_cast<std::size_t>(from)] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v : adjacency[static_cast<std::size_t>(u)]) {
      if (hops[static_cast<std::size_t>(v)] < 0) {
        hops[static_cast<std::size_t>(v)] = hops[static_cast<std::size_t>(u)] + 1;
        frontier.push_back(v);
      }
    }
  }
  return hops;
}

} // namespace madcloud::baselines
