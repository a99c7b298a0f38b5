#include "madcloud/sim/engine.hpp"

namespace madcloud::sim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::MobilityStep: return "mobility-step";
    case EventKind::MessageDelivery: return "message-delivery";
    case EventKind::TaskProgress: return "task-progress";
    case EventKind::Timer: return "timer";
    case EventKind::LinkStateChange: return "link-state-change";
  }
  return "?";
}

EventId Engine::schedule(double fire_at, EventKind kind, EventFn fn) {
  if (fire_at < now_) {
    throw std::logic_error("Engine::schedule: fire_at precedes current time");
  }
  const EventId id = next_seq_++;
  queue_.push(Entry{fire_at, id, kind, std::move(fn)});
  return id;
}

std::size_t Engine::run_until(double t_end) {
  if (t_end < now_) {
    throw std::logic_error("Engine::run_until: t_end precedes current time");
  }
  std::size_t count = 0;
  while (!queue_.empty() && queue_.top().fire_at <= t_end) {
    // priority_queue::top is const; the entry must be moved out before pop.
    Entry e = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    now_ = e.fire_at;
    ++count;
    ++processed_;
    e.fn();
  }
  now_ = t_end;
  return count;
}

} // namespace madcloud::sim
