#include "madcloud/radio/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace madcloud::radio {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

} // namespace

MobilityModel::MobilityModel(std::vector<MobilityGroup> groups, double area_m, int node_count,
                             sim::RngStream& rng)
    : area_m_(area_m),
      offsets_(static_cast<std::size_t>(node_count)),
      positions_(static_cast<std::size_t>(node_count)) {
  for (auto& g : groups) {
    GroupState st;
    st.cfg = std::move(g);
    // An all-zero region means the whole area; a point region pins the group.
    const Region& r = st.cfg.region;
    if (r.x0 == 0.0 && r.y0 == 0.0 && r.x1 == 0.0 && r.y1 == 0.0) {
      st.cfg.region = Region{0.0, 0.0, area_m_, area_m_};
    } else {
      st.cfg.region.x1 = std::max(r.x1, r.x0);
      st.cfg.region.y1 = std::max(r.y1, r.y0);
    }
    if (st.cfg.start) {
      st.centroid = *st.cfg.start;
    } else {
      st.centroid.x = rng.uniform(st.cfg.region.x0, st.cfg.region.x1);
      st.centroid.y = rng.uniform(st.cfg.region.y0, st.cfg.region.y1);
    }
    draw_waypoint(st, rng);
    groups_.push_back(std::move(st));
  }
  // Fixed per-node jitter offset, uniform in the group's jitter disk.
  for (auto& g : groups_) {
    for (NodeId n : g.cfg.members) {
      const double r = g.cfg.jitter_radius_m * std::sqrt(rng.u01());
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      offsets_[static_cast<std::size_t>(n)] = Position{r * std::cos(phi), r * std::sin(phi)};
    }
    place_members(g);
  }
}

void MobilityModel::draw_waypoint(GroupState& g, sim::RngStream& rng) {
  g.waypoint.x = rng.uniform(g.cfg.region.x0, g.cfg.region.x1);
  g.waypoint.y = rng.uniform(g.cfg.region.y0, g.cfg.region.y1);
}

void MobilityModel::place_members(const GroupState& g) {
  for (NodeId n : g.cfg.members) {
    const auto i = static_cast<std::size_t>(n);
    positions_[i].x = clamp(g.centroid.x + offsets_[i].x, 0.0, area_m_);
    positions_[i].y = clamp(g.centroid.y + offsets_[i].y, 0.0, area_m_);
  }
}

void MobilityModel::advance(double dt, sim::RngStream& rng) {
  for (auto& g : groups_) {
    double remaining = g.cfg.speed_mps * dt;
    while (remaining > 0.0) {
      const double dx = g.waypoint.x - g.centroid.x;
      const double dy = g.waypoint.y - g.centroid.y;
      const double dist = std::hypot(dx, dy);
      if (dist <= remaining) {
        g.centroid = g.waypoint;
        remaining -= dist;
        draw_waypoint(g, rng);
        if (g.cfg.speed_mps <= 0.0) break;
      } else {
        g.centroid.x += dx / dist * remaining;
        g.centroid.y += dy / dist * remaining;
        remaining = 0.0;
      }
    }
    place_members(g);
  }
}

} // namespace madcloud::radio
