#include "madcloud/sim/rng.hpp"

namespace madcloud::sim {

namespace {

// FNV-1a, used to fold the stream label into the seed.
std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view stream_id) : seed_(seed) {
  const std::uint64_t label = hash_label(stream_id);
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(label),
      static_cast<std::uint32_t>(label >> 32),
  };
  engine_.seed(seq);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) { // full 64-bit range
    return static_cast<std::int64_t>(engine_());
  }
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

} // namespace madcloud::sim
