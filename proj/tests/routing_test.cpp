#include "madcloud/net/routing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "madcloud/sim/rng.hpp"

using namespace madcloud;
using namespace madcloud::net;

namespace {

PacketParams packets_512() { return PacketParams{4096.0, 256.0}; }

RouteEntry entry(NodeId dest, int level, double lifetime, double p, double lq = 1e6,
                 double avg_dl = 0.0) {
  RouteEntry e;
  e.next_node = dest;
  e.dest_node = dest;
  e.power_level = level;
  e.predicted_lifetime_s = lifetime;
  e.lifetime_probability = p;
  e.link_quality_bps = lq;
  e.pkts_avg_dl = avg_dl;
  return e;
}

} // namespace

TEST(PacketsFor, SinglePayloadIsOnePacket) {
  EXPECT_EQ(packets_for(3840, packets_512()), 1);
}

TEST(PacketsFor, HandArithmetic) {
  EXPECT_EQ(packets_for(8192, packets_512()), 3); // ceil(8192 / 3840)
}

TEST(PacketsFor, EmptyTransferIsZeroPackets) {
  EXPECT_EQ(packets_for(0, packets_512()), 0);
}

TEST(PacketsFor, HeaderSwallowingPacketSizeIsAnError) {
  EXPECT_THROW(packets_for(100, PacketParams{256.0, 256.0}), std::invalid_argument);
}

TEST(AvailableBandwidth, NoTrafficMeansFullChannel) {
  EXPECT_DOUBLE_EQ(available_bandwidth_bps(11e6, {}), 11e6);
}

TEST(AvailableBandwidth, HandEvaluation) {
  const double self[] = {2e6, 3e6};
  EXPECT_DOUBLE_EQ(available_bandwidth_bps(11e6, self), 6e6);
}

TEST(AvailableBandwidth, FlooredAtZero) {
  const double self[] = {9e6, 5e6};
  EXPECT_DOUBLE_EQ(available_bandwidth_bps(11e6, self), 0.0);
}

TEST(EstimateDtt, HandEvaluationWithoutLosses) {
  auto e = entry(1, 0, 100.0, 1.0, 1e6);
  // Three packets of 4096 bits at 1 Mb/s.
  EXPECT_NEAR(estimate_dtt_s(3 * 3840, e, packets_512()), 0.012288, 1e-15);
}

TEST(EstimateDtt, LossHistoryAddsRetransmissionTime) {
  auto e = entry(1, 0, 100.0, 1.0, 1e6, 1.0);
  EXPECT_NEAR(estimate_dtt_s(3 * 3840, e, packets_512()), 0.016384, 1e-15);
}

TEST(EstimateDtt, EmptyTransferTakesNoTime) {
  auto e = entry(1, 0, 100.0, 1.0, 1e6, 5.0);
  EXPECT_DOUBLE_EQ(estimate_dtt_s(0, e, packets_512()), 0.0);
}

TEST(EstimateDtt, ZeroQualityIsUnusable) {
  auto e = entry(1, 0, 100.0, 1.0, 0.0);
  EXPECT_TRUE(std::isinf(estimate_dtt_s(1000, e, packets_512())));
}

TEST(EstimateDtt, StrictlyDecreasingInQualityIncreasingInLosses) {
  sim::RngStream rng(31, "routing");
  for (int i = 0; i < 200; ++i) {
    const auto bits = rng.uniform_int(1, 10'000'000);
    const double lq = rng.uniform(1e4, 11e6);
    const double avg = rng.uniform(0.0, 20.0);
    auto base = entry(1, 0, 0.0, 0.0, lq, avg);
    auto better_lq = base;
    better_lq.link_quality_bps = lq * rng.uniform(1.01, 3.0);
    auto worse_dl = base;
    worse_dl.pkts_avg_dl = avg + rng.uniform(0.01, 10.0);
    const auto p = packets_512();
    EXPECT_LT(estimate_dtt_s(bits, better_lq, p), estimate_dtt_s(bits, base, p));
    EXPECT_GT(estimate_dtt_s(bits, worse_dl, p), estimate_dtt_s(bits, base, p));
  }
}

// ---------------------------------------------------------------------------
// Tables

TEST(RoutingTableSet, UpsertMovesEntryWhenLevelChanges) {
  RoutingTableSet tables(3);
  tables.upsert(2, entry(7, 2, 10.0, 0.5));
  ASSERT_NE(tables.routes(2, 7), nullptr);
  tables.upsert(1, entry(7, 1, 10.0, 0.5));
  EXPECT_EQ(tables.routes(2, 7), nullptr);
  ASSERT_NE(tables.routes(1, 7), nullptr);
  EXPECT_EQ((*tables.routes(1, 7))[0].power_level, 1);
}

TEST(RoutingTableSet, UpsertPreservesDropStatistics) {
  RoutingTableSet tables(3);
  auto& stored = tables.upsert(1, entry(7, 1, 10.0, 0.5));
  stored.pkts_avg_dl = 3.5;
  tables.upsert(1, entry(7, 1, 99.0, 0.9));
  EXPECT_DOUBLE_EQ((*tables.routes(1, 7))[0].pkts_avg_dl, 3.5);
  EXPECT_DOUBLE_EQ((*tables.routes(1, 7))[0].predicted_lifetime_s, 99.0);
}

// ---------------------------------------------------------------------------
// Route selection

TEST(SelectRoute, SingleQualifyingRouteIsSelected) {
  RoutingTableSet tables(3);
  tables.upsert(5, entry(5, 0, 100.0, 0.8));
  const auto sel = select_route(5, 1000, tables, packets_512());
  ASSERT_TRUE(sel.has_value());
  EXPECT_FALSE(sel->fallback);
  EXPECT_EQ(sel->entry.dest_node, 5);
}

TEST(SelectRoute, FasterAndMoreReliableRouteWins) {
  // Two qualifying routes: (slower, p=0.6) vs (faster, p=0.9).
  RoutingTableSet tables(1);
  auto slow = entry(5, 0, 100.0, 0.6, 0.5e6);
  auto fast = entry(5, 0, 100.0, 0.9, 1e6);
  fast.next_node = 6;
  tables.upsert(0, slow);
  tables.upsert(0, fast);
  const auto sel = select_route(5, 3 * 3840, tables, packets_512());
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->entry.next_node, 6);
  EXPECT_FALSE(sel->fallback);
}

TEST(SelectRoute, DestOnlyInHighestTableSelectsThere) {
  RoutingTableSet tables(3);
  tables.upsert(2, entry(9, 2, 100.0, 0.7));
  const auto sel = select_route(9, 1000, tables, packets_512());
  ASSERT_TRUE(sel.has_value());
  EXPECT_EQ(sel->entry.power_level, 2);
}

TEST(SelectRoute, NeverReturnsNonFallbackRouteWithInsufficientLifetime) {
  sim::RngStream rng(77, "routing");
  const auto params = packets_512();
  for (int i = 0; i < 500; ++i) {
    RoutingTableSet tables(3);
    const int n_routes = static_cast<int>(rng.uniform_int(1, 4));
    for (int r = 0; r < n_routes; ++r) {
      auto e = entry(4, static_cast<int>(rng.uniform_int(0, 2)), rng.uniform(0.0, 0.5),
                     rng.uniform(0.0, 1.0), rng.uniform(1e4, 1e7), rng.uniform(0.0, 5.0));
      e.next_node = 4 + r;
      tables.upsert(e.power_level, e);
    }
    const auto bits = rng.uniform_int(1000, 5'000'000);
    const auto sel = select_route(4, bits, tables, params);
    ASSERT_TRUE(sel.has_value());
    if (!sel->fallback) {
      EXPECT_GE(sel->entry.predicted_lifetime_s, sel->estimated_dtt_s);
    }
  }
}

TEST(SelectRoute, FallsBackToLongestLivedRouteAtLowestLevel) {
  RoutingTableSet tables(3);
  tables.upsert(1, entry(5, 1, 0.001, 0.5)); // lifetime cannot cover any transfer
  auto longer = entry(5, 1, 0.002, 0.1);
  longer.next_node = 6;
  tables.upsert(1, longer);
  tables.upsert(2, entry(5, 2, 50.0, 0.0)); // would qualify but p stays 0 tie-break order
  const auto sel = select_route(5, 10'000'000, tables, packets_512());
  ASSERT_TRUE(sel.has_value());
  if (sel->fallback) {
    EXPECT_EQ(sel->entry.power_level, 1);
    EXPECT_EQ(sel->entry.next_node, 6); // max lifetime at the lowest level
  } else {
    // The level-2 route qualifies (50 s covers the transfer).
    EXPECT_EQ(sel->entry.power_level, 2);
  }
}

TEST(SelectRoute, UnknownDestinationIsAnError) {
  RoutingTableSet tables(3);
  EXPECT_FALSE(select_route(5, 1000, tables, packets_512()).has_value());
}

TEST(SelectRoute, InvariantUnderRouteListPermutation) {
  sim::RngStream rng(13, "routing");
  const auto params = packets_512();
  for (int trial = 0; trial < 300; ++trial) {
    // Distinct transfer times and probabilities per route.
    std::vector<RouteEntry> routes;
    const int n = static_cast<int>(rng.uniform_int(2, 5));
    for (int r = 0; r < n; ++r) {
      auto e = entry(3, 0, rng.uniform(0.0, 60.0), 0.1 + 0.8 * (r + rng.u01()) / (n + 1),
                     1e5 * (r + 1) + rng.uniform(0.0, 1e4), rng.uniform(0.0, 3.0));
      e.next_node = 10 + r;
      routes.push_back(e);
    }
    const auto bits = rng.uniform_int(1000, 2'000'000);

    auto run = [&](const std::vector<RouteEntry>& order) {
      RoutingTableSet tables(1);
      for (const auto& e : order) tables.upsert(0, e);
      const auto sel = select_route(3, bits, tables, params);
      return sel ? sel->entry.next_node : kNoNode;
    };
    const NodeId baseline = run(routes);
    auto shuffled = routes;
    for (int s = 0; s < 5; ++s) {
      // Deterministic shuffle via the seeded stream.
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1],
                  shuffled[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
      }
      EXPECT_EQ(run(shuffled), baseline);
    }
  }
}
