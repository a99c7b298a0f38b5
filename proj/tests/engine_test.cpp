#include "madcloud/sim/engine.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "madcloud/sim/rng.hpp"

using namespace madcloud::sim;

TEST(Engine, ImmediateEventRunsBeforeLaterOnes) {
  Engine eng;
  std::vector<int> order;
  eng.schedule(1.0, EventKind::Timer, [&] { order.push_back(2); });
  eng.schedule(eng.now(), EventKind::Timer, [&] { order.push_back(1); });
  eng.run_until(2.0);
  ASSERT_EQ(order, (std::vector<int>{1, 2}));
}

TEST(Engine, FifoTieBreakAmongSimultaneousEvents) {
  Engine eng;
  std::vector<char> order;
  eng.schedule(5.0, EventKind::Timer, [&] { order.push_back('A'); });
  eng.schedule(5.0, EventKind::Timer, [&] { order.push_back('B'); });
  eng.run_until(5.0);
  ASSERT_EQ(order, (std::vector<char>{'A', 'B'}));
}

TEST(Engine, SchedulingInThePastIsALogicError) {
  Engine eng;
  eng.schedule(1.0, EventKind::Timer, [] {});
  eng.run_until(1.0);
  EXPECT_THROW(eng.schedule(0.0, EventKind::Timer, [] {}), std::logic_error);
}

TEST(Engine, RunUntilEmptyQueueAdvancesClock) {
  Engine eng;
  EXPECT_EQ(eng.run_until(10.0), 0u);
  EXPECT_DOUBLE_EQ(eng.now(), 10.0);
}

TEST(Engine, RunUntilBoundaryIsInclusive) {
  Engine eng;
  int fired = 0;
  eng.schedule(1.0, EventKind::Timer, [&] { ++fired; });
  eng.schedule(2.0, EventKind::Timer, [&] { ++fired; });
  eng.schedule(3.0, EventKind::Timer, [&] { ++fired; });
  EXPECT_EQ(eng.run_until(2.0), 2u);
  EXPECT_EQ(fired, 2);
  EXPECT_DOUBLE_EQ(eng.now(), 2.0);
}

TEST(Engine, ClockNeverDecreasesAndOrderIsTotal) {
  Engine eng;
  RngStream rng(7, "test");
  std::vector<std::pair<double, EventId>> seen;
  double last = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double t = rng.uniform(0.0, 100.0);
    eng.schedule(t, EventKind::Timer, [&eng, &seen, &last, t] {
      EXPECT_GE(eng.now(), last);
      last = eng.now();
      seen.push_back({eng.now(), eng.total_processed()});
    });
  }
  eng.run_until(100.0);
  ASSERT_EQ(seen.size(), 500u);
  for (std::size_t i = 1; i < seen.size(); ++i) {
    // No two processed events may compare equal under (time, sequence).
    EXPECT_TRUE(seen[i - 1].first < seen[i].first || seen[i - 1].second < seen[i].second);
  }
}

TEST(Engine, SameSeedGivesIdenticalEventTrace) {
  auto run = [](std::uint64_t seed) {
    Engine eng;
    RngStream rng(seed, "trace");
    std::vector<double> trace;
    std::function<void()> tick = [&] {
      trace.push_back(eng.now());
      if (eng.now() < 50.0) {
        eng.schedule(eng.now() + rng.uniform(0.1, 2.0), EventKind::Timer, tick);
      }
    };
    eng.schedule(0.0, EventKind::Timer, tick);
    eng.run_until(60.0);
    return trace;
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}

TEST(RngStream, StreamsAreIndependentByLabel) {
  RngStream a1(9, "mobility");
  RngStream a2(9, "mobility");
  RngStream b(9, "packet-loss");
  bool diverged = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a1.next_u64();
    EXPECT_EQ(x, a2.next_u64());
    if (x != b.next_u64()) diverged = true;
  }
  EXPECT_TRUE(diverged);
}

TEST(RngStream, UniformIntCoversRangeInclusive) {
  RngStream rng(1, "test");
  bool saw_lo = false;
  bool saw_hi = false;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_int(3, 7);
    ASSERT_GE(v, 3);
    ASSERT_LE(v, 7);
    saw_lo |= v == 3;
    saw_hi |= v == 7;
  }
  EXPECT_TRUE(saw_lo);
  EXPECT_TRUE(saw_hi);
}
