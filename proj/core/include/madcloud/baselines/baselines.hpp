#pragma once

#include <optional>
#include <span>
#include <vector>

#include "madcloud/types.hpp"

namespace madcloud::baselines {

// Comparison allocators. Both communicate at maximum transmission power and
// are handed only the fields they are defined over, so they cannot consult
// link quality, link lifetime, or queue state.

struct HtaCandidate {
  NodeId id = kNoNode;
  double cpi = 1.0;
  double cct_s = 1e-9;
  double battery_j = 0.0;
};

// Heterogeneity-aware allocation: fastest node first (1 / (CPI * CCT)), then
// the larger available battery, then the lower id.
std::optional<NodeId> hta_allocate(std::span<const HtaCandidate> candidates);

struct MinHopCandidate {
  NodeId id = kNoNode;
  int hops = 0;
};

// Minimum-hop allocation: fewest hops from the consumer, ties to the lower id.
std::optional<NodeId> minhop_allocate(std::span<const MinHopCandidate> candidates);

// Breadth-first hop counts over an adjacency list; -1 marks unreachable nodes.
std::vector<int> hop_counts(const std::vector<std::vector<NodeId>>& adjacency, NodeId from);

} // namespace madcloud::baselines
