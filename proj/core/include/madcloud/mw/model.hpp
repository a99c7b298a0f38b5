#pragma once

#include <cstdint>
#include <string>

#include "madcloud/net/routing.hpp"
#include "madcloud/types.hpp"

namespace madcloud::mw {

// Static capabilities of one cloud member.
struct NodeSpec {
  NodeId node_id = kNoNode;
  Role role = Role::Provider;
  double cpi = 1.0;             // clock cycles per instruction
  double cct_s = 1e-9;          // clock cycle time
  double phi_s = 1e-3;          // scheduler allocate/deallocate overhead
  double p_static_w = 0.1;
  double active_gates = 10.0;   // A
  double capacitance_f = 1e-10; // C
  double voltage_v = 1.0;       // V
  double frequency_hz = 1e9;    // F
  double beta_j_per_packet = 6e-4;
  std::int64_t memory_bytes = 256LL << 20;
  double battery_j = 2000.0;

  // CPU power draw: static plus switching power A*C*V^2*F.
  double alpha_w() const {
    return p_static_w + active_gates * capacitance_f * voltage_v * voltage_v * frequency_hz;
  }
};

struct TaskSpec {
  TaskId task_id = -1;
  std::string task_type = "compute";
  std::int64_t instructions = 0;
  std::int64_t executed_instructions = 0;
  std::int64_t code_bits = 0;
  std::int64_t input_bits = 0;
  std::int64_t output_bits = 0;
  TaskStatus status = TaskStatus::Queued;
  NodeId assigned_node = kNoNode;
  NodeId consumer = kNoNode; // submitting node, receives the result

  std::int64_t total_bits() const { return code_bits + input_bits + output_bits; }
  double progress() const {
    return instructions == 0 ? 0.0
                             : static_cast<double>(executed_instructions) /
                                   static_cast<double>(instructions);
  }
};

// Packets a task moves over the network (code + input + output).
inline std::int64_t task_packets(const TaskSpec& task, const net::PacketParams& p) {
  return net::packets_for(task.total_bits(), p);
}

// Periods and thresholds of the monitoring protocol.
struct ProtocolTimers {
  double nim_period_s = 10.0;        // x
  int missed_nim_multiplier = 3;     // m: silent for m*x -> unavailable
  double tim_period_s = 15.0;        // z
  double mim_period_s = 30.0;
  double nium_threshold = 0.2;       // relative change triggering an update
  double failure_grace_multiplier = 2.0; // TIM silence tolerated up to grace*z
};

} // namespace madcloud::mw
