#include "madcloud/net/lifetime.hpp"

namespace madcloud::net {

const char* to_string(LifetimeInterval interval) {
  switch (interval) {
    case LifetimeInterval::Short: return "S";
    case LifetimeInterval::Medium: return "M";
    case LifetimeInterval::Long: return "L";
  }
  return "?";
}

LifetimeInterval classify_lifetime(double duration_s, const LifetimeBoundaries& b) {
  if (duration_s <= b.short_max_s) return LifetimeInterval::Short;
  if (duration_s <= b.medium_max_s) return LifetimeInterval::Medium;
  return LifetimeInterval::Long;
}

bool transition_permitted(LifetimeInterval from, LifetimeInterval to) {
  return static_cast<int>(to) >= static_cast<int>(from);
}

double interval_lower_bound_s(LifetimeInterval interval, const LifetimeBoundaries& b) {
  switch (interval) {
    case LifetimeInterval::Short: return 0.0;
    case LifetimeInterval::Medium: return b.short_max_s;
    case LifetimeInterval::Long: return b.medium_max_s;
  }
  return 0.0;
}

void LinkLifetimeModel::record_transition(double completed_lifetime_s) {
  const LifetimeInterval interval = classify_lifetime(completed_lifetime_s, boundaries_);
  if (prev_ && transition_permitted(*prev_, interval)) {
    ++counts_[static_cast<int>(*prev_)][static_cast<int>(interval)];
  }
  prev_ = interval;
}

std::array<double, 3> LinkLifetimeModel::row_probabilities(LifetimeInterval from) const {
  const int f = static_cast<int>(from);
  std::array<double, 3> row{};
  std::int64_t total = 0;
  for (int t = 0; t < 3; ++t) total += counts_[f][t];
  if (total == 0) {
    // No history: uniform prior over permitted transitions.
    const int permitted = 3 - f;
    for (int t = f; t < 3; ++t) row[t] = 1.0 / permitted;
    return row;
  }
  for (int t = 0; t < 3; ++t) {
    row[t] = static_cast<double>(counts_[f][t]) / static_cast<double>(total);
  }
  return row;
}

LifetimePrediction LinkLifetimeModel::predict(LifetimeInterval current) const {
  const auto row = row_probabilities(current);
  int best = static_cast<int>(current);
  for (int t = best + 1; t < 3; ++t) {
    if (row[t] > row[best]) best = t; // strict: ties keep the shorter interval
  }
  const auto interval = static_cast<LifetimeInterval>(best);
  return LifetimePrediction{interval, row[best], interval_lower_bound_s(interval, boundaries_)};
}

} // namespace madcloud::net
