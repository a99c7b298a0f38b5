#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace madcloud::sim {

// Seeded random stream dedicated to one purpose ("mobility", "packet-loss",
// "workload", ...). Streams with the same (seed, stream_id) produce the same
// draw sequence on every platform; adding draws to one stream never perturbs
// another. Distributions are derived from raw engine output instead of
// std:: distributions, whose sequences are implementation-defined.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return u01() < p; }

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace madcloud::sim
