#include "madcloud/radio/radio.hpp"

#include <gtest/gtest.h>

#include "madcloud/radio/mobility.hpp"
#include "madcloud/sim/rng.hpp"

using namespace madcloud;
using namespace madcloud::radio;

namespace {

RadioConfig three_levels() {
  RadioConfig r;
  r.levels = {{10.0, 60.0, 0.667e-4}, {16.02, 120.0, 2.67e-4}, {19.54, 180.0, 6e-4}};
  r.interference_extra_m = 20.0;
  r.path_loss_exponent = 2.0;
  r.rx_success_ratio = 1.0;
  return r;
}

} // namespace

TEST(Rssi, AtOneMeterEqualsTransmitPower) {
  EXPECT_DOUBLE_EQ(rssi_dbm(17.0, 1.0, 2.0), 17.0);
}

TEST(Rssi, HandEvaluatedLogDistanceValues) {
  EXPECT_NEAR(rssi_dbm(0.0, 100.0, 2.0), -40.0, 1e-12);
  EXPECT_NEAR(rssi_dbm(0.0, 10.0, 2.0), -20.0, 1e-12);
}

TEST(Rssi, SubMeterDistancesClampToOneMeter) {
  EXPECT_DOUBLE_EQ(rssi_dbm(5.0, 0.2, 2.0), rssi_dbm(5.0, 1.0, 2.0));
}

TEST(EstimateDistance, EqualPowersMeanOneMeter) {
  EXPECT_DOUBLE_EQ(estimate_distance_m(-7.0, -7.0, 2.0), 1.0);
}

TEST(EstimateDistance, HandEvaluatedInverse) {
  EXPECT_NEAR(estimate_distance_m(0.0, -40.0, 2.0), 100.0, 1e-9);
}

TEST(EstimateDistance, RoundTripsRssiOverTheUsableRange) {
  for (double d = 1.0; d <= 180.0; d += 0.25) {
    for (double n : {1.8, 2.0, 3.1}) {
      const double est = estimate_distance_m(12.0, rssi_dbm(12.0, d, n), n);
      EXPECT_NEAR(est, d, 1e-9 * d);
    }
  }
}

TEST(MinPowerLevel, PicksLowestCoveringLevel) {
  const auto radio = three_levels();
  EXPECT_EQ(min_power_level(100.0, radio), 1); // second level, 120 m
}

TEST(MinPowerLevel, BoundaryIsInclusive) {
  const auto radio = three_levels();
  EXPECT_EQ(min_power_level(60.0, radio), 0);
}

TEST(MinPowerLevel, BeyondMaxRangeIsUnreachable) {
  const auto radio = three_levels();
  EXPECT_FALSE(min_power_level(200.0, radio).has_value());
}

TEST(MinPowerLevel, MonotoneInDistance) {
  const auto radio = three_levels();
  int prev = 0;
  for (double d = 1.0; d <= 180.0; d += 0.5) {
    const auto level = min_power_level(d, radio);
    ASSERT_TRUE(level.has_value());
    EXPECT_GE(*level, prev);
    prev = *level;
  }
}

TEST(RadioConfig, EnergyNonDecreasingInLevel) {
  const auto radio = three_levels();
  for (std::size_t i = 1; i < radio.levels.size(); ++i) {
    EXPECT_GE(radio.levels[i].energy_per_packet_j, radio.levels[i - 1].energy_per_packet_j);
  }
  EXPECT_TRUE(radio.valid());
}

TEST(Deliverable, CertainSuccessInsideRange) {
  auto radio = three_levels();
  sim::RngStream rng(3, "packet-loss");
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(deliverable(59.0, 0, radio, rng), Delivery::Delivered);
  }
}

TEST(Deliverable, InterferenceAnnulusAlwaysLoses) {
  auto radio = three_levels();
  sim::RngStream rng(3, "packet-loss");
  EXPECT_EQ(deliverable(61.0, 0, radio, rng), Delivery::Lost);
  EXPECT_EQ(deliverable(80.0, 0, radio, rng), Delivery::Lost);
  EXPECT_EQ(deliverable(80.1, 0, radio, rng), Delivery::OutOfRange);
  EXPECT_EQ(deliverable(190.0, 2, radio, rng), Delivery::Lost);
  EXPECT_EQ(deliverable(201.0, 2, radio, rng), Delivery::OutOfRange);
}

TEST(Deliverable, EmpiricalRateMatchesConfiguredRatio) {
  auto radio = three_levels();
  radio.rx_success_ratio = 0.9;
  sim::RngStream rng(11, "packet-loss");
  int delivered = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    delivered += deliverable(50.0, 0, radio, rng) == Delivery::Delivered;
  }
  EXPECT_NEAR(static_cast<double>(delivered) / trials, 0.9, 0.02);
}

// ---------------------------------------------------------------------------
// Mobility

TEST(Mobility, ZeroSpeedLeavesPositionsUnchanged) {
  sim::RngStream rng(5, "mobility");
  MobilityGroup g;
  g.members = {0, 1};
  g.speed_mps = 0.0;
  g.jitter_radius_m = 25.0;
  MobilityModel model({g}, 1200.0, 2, rng);
  const auto before = model.positions();
  model.advance(10.0, rng);
  const auto& after = model.positions();
  for (int i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(before[i].x, after[i].x);
    EXPECT_DOUBLE_EQ(before[i].y, after[i].y);
  }
}

TEST(Mobility, CentroidMovesTowardWaypointAtSpeed) {
  sim::RngStream rng(5, "mobility");
  MobilityGroup g;
  g.members = {0};
  g.speed_mps = 10.0;
  g.jitter_radius_m = 0.0;
  g.start = Position{0.0, 0.0};
  g.region = Region{100.0, 0.0, 100.0, 0.0}; // waypoint pinned at (100, 0)
  MobilityModel model({g}, 1200.0, 1, rng);
  model.advance(1.0, rng);
  EXPECT_NEAR(model.position(0).x, 10.0, 1e-9);
  EXPECT_NEAR(model.position(0).y, 0.0, 1e-9);
}

TEST(Mobility, PositionsStayInsideTheAreaForAWholeRun) {
  sim::RngStream rng(17, "mobility");
  MobilityGroup g;
  g.members = {0, 1, 2, 3};
  g.speed_mps = 15.0;
  g.jitter_radius_m = 80.0;
  MobilityModel model({g}, 1200.0, 4, rng);
  for (int step = 0; step < 3600; ++step) {
    model.advance(1.0, rng);
    for (const auto& p : model.positions()) {
      ASSERT_GE(p.x, 0.0);
      ASSERT_LE(p.x, 1200.0);
      ASSERT_GE(p.y, 0.0);
      ASSERT_LE(p.y, 1200.0);
    }
  }
}
