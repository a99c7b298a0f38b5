#include "madcloud/sim/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace madcloud::sim {

const char* to_string(PacketOutcome outcome) {
  switch (outcome) {
    case PacketOutcome::Delivered: return "delivered";
    case PacketOutcome::Lost: return "lost";
    case PacketOutcome::Interference: return "interference";
    case PacketOutcome::OutOfRange: return "out-of-range";
    case PacketOutcome::Broadcast: return "broadcast";
  }
  return "?";
}

namespace {

struct Line {
  double t;
  std::uint64_t order;
  std::string text;
};

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return std::string(buf);
}

} // namespace

void Trace::write_text(const std::string& path) const {
  std::vector<Line> lines;
  lines.reserve(packets_.size() + tasks_.size() + execs_.size() + positions_.size());
  std::uint64_t order = 0;
  for (const auto& p : packets_) {
    lines.push_back({p.t, order++,
                     fmt("t=%.9g pkt src=%d dst=%d level=%d kind=%s type=%s outcome=%s "
                         "bits=%lld energy=%.9g",
                         p.t, p.src, p.dst, p.level + 1, p.control ? "control" : "data", p.type,
                         to_string(p.outcome), static_cast<long long>(p.bits), p.energy_j)});
  }
  for (const auto& t : tasks_) {
    lines.push_back({t.t, order++,
                     fmt("t=%.9g task id=%d from=%s to=%s node=%d", t.t, t.task,
                         to_string(t.from), to_string(t.to), t.node)});
  }
  for (const auto& e : execs_) {
    lines.push_back({e.t, order++,
                     fmt("t=%.9g exec task=%d node=%d instructions=%lld", e.t, e.task, e.node,
                         static_cast<long long>(e.instructions))});
  }
  for (const auto& p : positions_) {
    lines.push_back(
        {p.t, order++, fmt("t=%.9g pos node=%d x=%.9g y=%.9g", p.t, p.node, p.x, p.y)});
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.order < b.order;
  });

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open trace file: " + path);
  for (const auto& l : lines) {
    std::fputs(l.text.c_str(), f);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

} // namespace madcloud::sim
