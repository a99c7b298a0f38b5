#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "madcloud/types.hpp"

namespace madcloud::mw {

// On-wire field widths in bytes, used to derive message sizes.
namespace wire {
inline constexpr int kType = 1;
inline constexpr int kNodeId = 2;
inline constexpr int kTaskId = 2;
inline constexpr int kCpi = 2;
inline constexpr int kCct = 4;
inline constexpr int kBroadcastId = 4;
inline constexpr int kScalar = 4; // queue time, memory, battery, data sizes
inline constexpr int kStatus = 1;
inline constexpr int kTxPower = 2;
inline constexpr int kLevel = 1;
inline constexpr int kInstructions = 8;
} // namespace wire

// Node information message: static capabilities, broadcast every x seconds.
struct Nim {
  NodeId node_id = kNoNode;
  double cpi = 0.0;
  double cct_s = 0.0;
  std::uint32_t broadcast_id = 0;
};

// Node information request: pulls dynamic state from a newly heard node.
struct Nirm {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
};

// Node information update: dynamic state, sent on threshold crossings and in
// response to a NIRM.
struct Nium {
  NodeId node_id = kNoNode;
  double queue_waiting_time_s = 0.0;
  std::int64_t memory_bytes = 0;
  double battery_j = 0.0;
  NodeId dst = kNoNode; // kNoNode when broadcast
};

struct MimMember {
  NodeId member_id = kNoNode;
  double cpi = 0.0;
  double cct_s = 0.0;
};

// Members information message: shares resource-pool contents.
struct Mim {
  NodeId node_id = kNoNode;
  std::vector<MimMember> members;
  std::uint32_t broadcast_id = 0;
};

// Members dynamic information request.
struct Mdirm {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  std::vector<NodeId> member_ids;
};

// Members information update: dynamic state of one pool member.
struct Mium {
  NodeId src = kNoNode;
  NodeId member_id = kNoNode;
  double queue_waiting_time_s = 0.0;
  std::int64_t memory_bytes = 0;
  double battery_j = 0.0;
  NodeId dst = kNoNode;
};

struct TimTask {
  TaskId task_id = -1;
  TaskStatus status = TaskStatus::Executing;
};

// Task information message: periodic status heartbeat, doubles as the
// failure detector input.
struct Tim {
  NodeId node_id = kNoNode;
  std::vector<TimTask> tasks;
  NodeId dst = kNoNode;
};

// Discovery request, always broadcast at maximum power.
struct DiscoveryRequest {
  NodeId src = kNoNode;
  double tx_power_dbm = 0.0;
  std::uint32_t broadcast_id = 0;
};

// Discovery reply, sent at the level the replier selected for the pair.
struct DiscoveryReply {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  int selected_level = 0;
};

// Per-level routing table maintenance probe. One instance of the control
// plane runs per power level, so probe traffic scales with the level count.
struct Hello {
  NodeId src = kNoNode;
  int level = 0;
};

// Task submission, consumer -> master.
struct TaskSubmit {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  TaskId task_id = -1;
  std::int64_t instructions = 0;
  std::int64_t code_bits = 0;
  std::int64_t input_bits = 0;
  std::int64_t output_bits = 0;
};

// Master -> consumer: dispatch the task to the selected provider. The attempt
// counter lets re-sent instructions be told apart from new allocations.
struct DispatchInstruction {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  TaskId task_id = -1;
  NodeId target = kNoNode;
  int attempt = 0;
};

// Provider -> master: a migration trigger fired for this task.
struct MigrationRequest {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  TaskId task_id = -1;
  std::int64_t executed_instructions = 0;
};

// Master -> provider: migrate the task to the selected target.
struct MigrationInstruction {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  TaskId task_id = -1;
  NodeId target = kNoNode;
};

// Status notification (completion, dispatch failure) toward the master.
struct StatusReport {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  TaskId task_id = -1;
  TaskStatus status = TaskStatus::Completed;
};

using ControlMessage =
    std::variant<Nim, Nirm, Nium, Mim, Mdirm, Mium, Tim, DiscoveryRequest, DiscoveryReply, Hello,
                 TaskSubmit, DispatchInstruction, MigrationRequest, MigrationInstruction,
                 StatusReport>;

// Wire size from the message's field layout.
int wire_size_bytes(const ControlMessage& msg);

const char* type_name(const ControlMessage& msg);

} // namespace madcloud::mw
