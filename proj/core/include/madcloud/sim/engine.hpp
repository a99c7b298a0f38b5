#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace madcloud::sim {

enum class EventKind {
  MobilityStep,
  MessageDelivery,
  TaskProgress,
  Timer,
  LinkStateChange,
};

const char* to_string(EventKind kind);

using EventFn = std::function<void()>;
using EventId = std::uint64_t;

// Single-threaded discrete-event core. Virtual time advances only by popping
// events; ties on fire time are broken by insertion sequence so a run is a
// total order.
class Engine {
public:
  double now() const { return now_; }

  // Enqueues an event. fire_at must not lie in the past; that is a logic bug
  // in the caller, not a runtime condition, so it throws.
  EventId schedule(double fire_at, EventKind kind, EventFn fn);

  // Processes every event with fire_at <= t_end in (fire_at, seq) order and
  // leaves the clock at t_end. Returns the number of events processed.
  std::size_t run_until(double t_end);

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t total_processed() const { return processed_; }

private:
  struct Entry {
    double fire_at;
    EventId seq;
    EventKind kind;
    EventFn fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  double now_ = 0.0;
  EventId next_seq_ = 0;
  std::uint64_t processed_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
};

} // namespace madcloud::sim
