#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "madcloud/types.hpp"

namespace madcloud::sim {

enum class PacketOutcome { Delivered, Lost, Interference, OutOfRange, Broadcast };

const char* to_string(PacketOutcome outcome);

// One radio transmission. Broadcasts appear once (outcome Broadcast); unicast
// packets carry the receiver-side outcome. energy_j is what the sender spent.
struct PacketRecord {
  double t;
  NodeId src;
  NodeId dst; // kNoNode for broadcasts
  int level;
  bool control; // control plane vs task data
  const char* type;
  PacketOutcome outcome;
  double energy_j;
  std::int64_t bits;
};

struct TaskRecord {
  double t;
  TaskId task;
  TaskStatus from;
  TaskStatus to;
  NodeId node;
};

// Closed execution segment: `instructions` were executed for `task` on
// `node`. Sums to the task's instruction count when work is conserved.
struct ExecRecord {
  double t;
  TaskId task;
  NodeId node;
  std::int64_t instructions;
};

struct PositionRecord {
  double t;
  NodeId node;
  double x;
  double y;
};

// In-memory run trace. Everything the metrics, validators, and the textual
// trace.log are derived from.
class Trace {
public:
  bool record_positions = true;

  void packet(PacketRecord r) { packets_.push_back(r); }
  void task(TaskRecord r) { tasks_.push_back(r); }
  void exec(ExecRecord r) { execs_.push_back(r); }
  void position(PositionRecord r) {
    if (record_positions) positions_.push_back(r);
  }

  const std::vector<PacketRecord>& packets() const { return packets_; }
  const std::vector<TaskRecord>& tasks() const { return tasks_; }
  const std::vector<ExecRecord>& execs() const { return execs_; }
  const std::vector<PositionRecord>& positions() const { return positions_; }

  // Writes the per-event text form (one line per record, time-ordered).
  void write_text(const std::string& path) const;

private:
  std::vector<PacketRecord> packets_;
  std::vector<TaskRecord> tasks_;
  std::vector<ExecRecord> execs_;
  std::vector<PositionRecord> positions_;
};

} // namespace madcloud::sim
