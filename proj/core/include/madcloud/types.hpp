#pragma once

#include <cstdint>

namespace madcloud {

using NodeId = int;
using TaskId = int;

inline constexpr NodeId kNoNode = -1;

// Cloud member roles: the master schedules, providers execute, consumers
// submit tasks and receive results.
enum class Role { Master, Provider, Consumer };

enum class TaskStatus {
  Queued,
  Dispatched,
  Executing,
  Migrating,
  Completed,
  Failed,
};

inline const char* to_string(Role role) {
  switch (role) {
    case Role::Master: return "SMN";
    case Role::Provider: return "SPN";
    case Role::Consumer: return "SCN";
  }
  return "?";
}

inline const char* to_string(TaskStatus status) {
  switch (status) {
    case TaskStatus::Queued: return "queued";
    case TaskStatus::Dispatched: return "dispatched";
    case TaskStatus::Executing: return "executing";
    case TaskStatus::Migrating: return "migrating";
    case TaskStatus::Completed: return "completed";
    case TaskStatus::Failed: return "failed";
  }
  return "?";
}

} // namespace madcloud
