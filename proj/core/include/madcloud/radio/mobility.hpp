#pragma once

#include <optional>
#include <vector>

#include "madcloud/radio/radio.hpp"
#include "madcloud/sim/rng.hpp"
#include "madcloud/types.hpp"

namespace madcloud::radio {

// Axis-aligned box the group wanders in; defaults to the whole area.
struct Region {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

struct MobilityGroup {
  std::vector<NodeId> members;
  double speed_mps = 1.0;
  double jitter_radius_m = 20.0;
  Region region;
  std::optional<Position> start; // fixed start centroid; default seeded in region
};

// Group waypoint mobility: each group's centroid walks toward a seeded
// waypoint at constant speed; on arrival the next waypoint is drawn. Members
// sit at a fixed seeded offset from the centroid, clamped to the area. All
// draws come from the mobility stream, so traces pair across schemes.
class MobilityModel {
public:
  MobilityModel(std::vector<MobilityGroup> groups, double area_m, int node_count,
                sim::RngStream& rng);

  // Advances every group by dt seconds and refreshes node positions.
  void advance(double dt, sim::RngStream& rng);

  const std::vector<Position>& positions() const { return positions_; }
  const Position& position(NodeId n) const { return positions_[static_cast<std::size_t>(n)]; }
  double area_m() const { return area_m_; }

private:
  struct GroupState {
    MobilityGroup cfg;
    Position centroid;
    Position waypoint;
  };

  void draw_waypoint(GroupState& g, sim::RngStream& rng);
  void place_members(const GroupState& g);

  double area_m_;
  std::vector<GroupState> groups_;
  std::vector<Position> offsets_; // per node, fixed for the run
  std::vector<Position> positions_;
};

} // namespace madcloud::radio
