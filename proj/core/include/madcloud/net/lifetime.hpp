#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace madcloud::net {

// A link's continuous up-period falls into one of three buckets; the buckets
// are the state space of the per-link Markov predictor.
enum class LifetimeInterval : int { Short = 0, Medium = 1, Long = 2 };

const char* to_string(LifetimeInterval interval);

struct LifetimeBoundaries {
  double short_max_s = 30.0;
  double medium_max_s = 120.0;
};

LifetimeInterval classify_lifetime(double duration_s, const LifetimeBoundaries& b);

// A transition may only lengthen the bucket: Medium->Short, Long->Medium and
// Long->Short are not permitted.
bool transition_permitted(LifetimeInterval from, LifetimeInterval to);

// Representative duration of a predicted interval: the interval's lower
// bound, which keeps lifetime >= transfer-time tests conservative.
double interval_lower_bound_s(LifetimeInterval interval, const LifetimeBoundaries& b);

struct LifetimePrediction {
  LifetimeInterval interval;
  double probability;
  double lifetime_s;
};

// Per-link transition counts over completed up-periods, normalized per row on
// demand (maximum likelihood). Rows with no data fall back to a uniform prior
// over the permitted transitions. Observed forbidden transitions are never
// counted, so forbidden cells stay exactly zero.
class LinkLifetimeModel {
public:
  explicit LinkLifetimeModel(LifetimeBoundaries boundaries = {}) : boundaries_(boundaries) {}

  // Feeds one completed up-period. The first observation has no predecessor
  // and records nothing.
  void record_transition(double completed_lifetime_s);

  // Row of transition probabilities out of `from`.
  std::array<double, 3> row_probabilities(LifetimeInterval from) const;

  // Argmax over the row; ties break toward the shorter interval.
  LifetimePrediction predict(LifetimeInterval current) const;

  std::int64_t count(LifetimeInterval from, LifetimeInterval to) const {
    return counts_[static_cast<int>(from)][static_cast<int>(to)];
  }
  std::optional<LifetimeInterval> previous_interval() const { return prev_; }
  const LifetimeBoundaries& boundaries() const { return boundaries_; }

private:
  LifetimeBoundaries boundaries_;
  std::array<std::array<std::int64_t, 3>, 3> counts_{};
  std::optional<LifetimeInterval> prev_;
};

} // namespace madcloud::net
