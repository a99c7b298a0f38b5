#include "madcloud/net/lifetime.hpp"

#include <gtest/gtest.h>

#include <array>

#include "madcloud/sim/rng.hpp"

using namespace madcloud::net;
using madcloud::sim::RngStream;

namespace {

constexpr LifetimeInterval S = LifetimeInterval::Short;
constexpr LifetimeInterval M = LifetimeInterval::Medium;
constexpr LifetimeInterval L = LifetimeInterval::Long;

// Independent count-scan oracle for predictions: max probability among
// permitted transitions, ties to the shorter interval; uniform prior when the
// row is empty.
LifetimePrediction predict_oracle(const LinkLifetimeModel& model, LifetimeInterval from) {
  std::array<double, 3> row{};
  long long total = 0;
  for (int to = 0; to < 3; ++to) total += model.count(from, static_cast<LifetimeInterval>(to));
  if (total == 0) {
    const int permitted = 3 - static_cast<int>(from);
    for (int to = static_cast<int>(from); to < 3; ++to) row[to] = 1.0 / permitted;
  } else {
    for (int to = 0; to < 3; ++to) {
      row[to] = static_cast<double>(model.count(from, static_cast<LifetimeInterval>(to))) /
                static_cast<double>(total);
    }
  }
  int best = static_cast<int>(from);
  for (int to = best + 1; to < 3; ++to) {
    if (row[to] > row[best]) best = to;
  }
  return {static_cast<LifetimeInterval>(best), row[best],
          interval_lower_bound_s(static_cast<LifetimeInterval>(best), model.boundaries())};
}

double duration_for(LifetimeInterval interval) {
  switch (interval) {
    case S: return 10.0;
    case M: return 60.0;
    default: return 500.0;
  }
}

} // namespace

TEST(ClassifyLifetime, DirectComparisons) {
  const LifetimeBoundaries b{30.0, 120.0};
  EXPECT_EQ(classify_lifetime(10.0, b), S);
  EXPECT_EQ(classify_lifetime(500.0, b), L);
  EXPECT_EQ(classify_lifetime(31.0, b), M);
}

TEST(ClassifyLifetime, BoundariesAreInclusive) {
  const LifetimeBoundaries b{30.0, 120.0};
  EXPECT_EQ(classify_lifetime(30.0, b), S);
  EXPECT_EQ(classify_lifetime(120.0, b), M);
}

TEST(Transitions, OnlyLengtheningIsPermitted) {
  EXPECT_TRUE(transition_permitted(S, S));
  EXPECT_TRUE(transition_permitted(S, M));
  EXPECT_TRUE(transition_permitted(S, L));
  EXPECT_TRUE(transition_permitted(M, M));
  EXPECT_TRUE(transition_permitted(M, L));
  EXPECT_TRUE(transition_permitted(L, L));
  EXPECT_FALSE(transition_permitted(M, S));
  EXPECT_FALSE(transition_permitted(L, M));
  EXPECT_FALSE(transition_permitted(L, S));
}

TEST(RecordTransition, FirstObservationHasNoPredecessor) {
  LinkLifetimeModel model;
  model.record_transition(10.0);
  for (int f = 0; f < 3; ++f) {
    for (int t = 0; t < 3; ++t) {
      EXPECT_EQ(model.count(static_cast<LifetimeInterval>(f), static_cast<LifetimeInterval>(t)),
                0);
    }
  }
  EXPECT_EQ(model.previous_interval(), S);
}

TEST(RecordTransition, ShortShortCountsOnce) {
  LinkLifetimeModel model;
  model.record_transition(10.0);
  model.record_transition(12.0);
  EXPECT_EQ(model.count(S, S), 1);
  const auto row = model.row_probabilities(S);
  EXPECT_DOUBLE_EQ(row[0], 1.0);
  EXPECT_DOUBLE_EQ(row[1], 0.0);
  EXPECT_DOUBLE_EQ(row[2], 0.0);
}

TEST(RecordTransition, MixedRowNormalizes) {
  LinkLifetimeModel model;
  model.record_transition(10.0); // S (no predecessor)
  model.record_transition(12.0); // S->S
  model.record_transition(60.0); // S->M
  const auto row = model.row_probabilities(S);
  EXPECT_DOUBLE_EQ(row[0], 0.5);
  EXPECT_DOUBLE_EQ(row[1], 0.5);
  EXPECT_DOUBLE_EQ(row[2], 0.0);
}

TEST(Predict, WorkedExampleRowS) {
  // Row S = (0.5, 0.4, 0.1): five S->S, four S->M, one S->L. Forbidden
  // observations in between only move the chain state.
  LinkLifetimeModel model;
  model.record_transition(duration_for(S));
  for (int i = 0; i < 5; ++i) model.record_transition(duration_for(S));
  for (int i = 0; i < 4; ++i) {
    model.record_transition(duration_for(M));
    model.record_transition(duration_for(S)); // M->S skipped, state back to S
  }
  model.record_transition(duration_for(L));
  const auto row = model.row_probabilities(S);
  EXPECT_DOUBLE_EQ(row[0], 0.5);
  EXPECT_DOUBLE_EQ(row[1], 0.4);
  EXPECT_DOUBLE_EQ(row[2], 0.1);
  const auto p = model.predict(S);
  EXPECT_EQ(p.interval, S);
  EXPECT_DOUBLE_EQ(p.probability, 0.5);
}

TEST(Predict, ForbiddenCellsNeverWin) {
  LinkLifetimeModel model;
  model.record_transition(duration_for(M));
  model.record_transition(duration_for(M));
  model.record_transition(duration_for(S)); // forbidden M->S: skipped
  model.record_transition(duration_for(M)); // S->M
  for (int i = 0; i < 200; ++i) {
    EXPECT_NE(model.predict(M).interval, S);
  }
  EXPECT_EQ(model.count(M, S), 0);
}

TEST(Predict, EmptyHistoryUsesUniformPriorWithShorterTieBreak) {
  LinkLifetimeModel model;
  const auto from_s = model.predict(S);
  EXPECT_EQ(from_s.interval, S);
  EXPECT_NEAR(from_s.probability, 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(from_s.lifetime_s, 0.0);
  const auto from_m = model.predict(M);
  EXPECT_EQ(from_m.interval, M);
  EXPECT_DOUBLE_EQ(from_m.probability, 0.5);
  EXPECT_DOUBLE_EQ(from_m.lifetime_s, 30.0);
  const auto from_l = model.predict(L);
  EXPECT_EQ(from_l.interval, L);
  EXPECT_DOUBLE_EQ(from_l.probability, 1.0);
  EXPECT_DOUBLE_EQ(from_l.lifetime_s, 120.0);
}

TEST(Predict, LowerBoundConversionIsConservative) {
  const LifetimeBoundaries b{30.0, 120.0};
  EXPECT_DOUBLE_EQ(interval_lower_bound_s(S, b), 0.0);
  EXPECT_DOUBLE_EQ(interval_lower_bound_s(M, b), 30.0);
  EXPECT_DOUBLE_EQ(interval_lower_bound_s(L, b), 120.0);
}

TEST(Model, RandomEventStormKeepsRowsNormalizedAndForbiddenZero) {
  LinkLifetimeModel model;
  RngStream rng(23, "lifetime");
  for (int i = 0; i < 100000; ++i) {
    model.record_transition(rng.uniform(0.0, 400.0));
  }
  for (int f = 0; f < 3; ++f) {
    const auto from = static_cast<LifetimeInterval>(f);
    const auto row = model.row_probabilities(from);
    double sum = 0.0;
    for (int t = 0; t < 3; ++t) {
      sum += row[t];
      if (!transition_permitted(from, static_cast<LifetimeInterval>(t))) {
        EXPECT_EQ(row[t], 0.0);
        EXPECT_EQ(model.count(from, static_cast<LifetimeInterval>(t)), 0);
      }
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    // Prediction equals the independent count-scan oracle.
    const auto got = model.predict(from);
    const auto want = predict_oracle(model, from);
    EXPECT_EQ(got.interval, want.interval);
    EXPECT_DOUBLE_EQ(got.probability, want.probability);
    EXPECT_DOUBLE_EQ(got.lifetime_s, want.lifetime_s);
  }
}
