#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "madcloud/mw/model.hpp"

namespace madcloud::mw {

// CPU processing time of a task on a node: I * CPI * CCT.
double processing_time_s(std::int64_t instructions, double cpi, double cct_s);

inline double processing_time_s(const TaskSpec& task, const NodeSpec& node) {
  return processing_time_s(task.instructions, node.cpi, node.cct_s);
}

// Residual processing time of the currently executing task: (I - IE) * CPI * CCT.
double residual_time_s(std::int64_t instructions, std::int64_t executed, double cpi,
                       double cct_s);

// Currently executing task, reduced to what the queue estimate needs.
struct ExecutingTask {
  std::int64_t instructions = 0;
  std::int64_t executed = 0;
};

// Queue wait a newly arriving task would see: the residual of the executing
// task, the processing time of everything already queued, and (m+2) scheduler
// overheads where m is the queue length.
double queue_time_s(const NodeSpec& node, const std::optional<ExecutingTask>& executing,
                    std::span<const std::int64_t> queued_instructions);

// Completion time: execution (processing + queue) plus data transfer.
inline double completion_time_s(double e_pt_s, double e_qt_s, double e_dtt_s) {
  return e_pt_s + e_qt_s + e_dtt_s;
}

// CPU power: static plus dynamic switching power.
double cpu_power_w(double p_static_w, double active_gates, double capacitance_f, double voltage_v,
                   double frequency_hz);

// Task energy estimate: CPU draw over the processing time plus the wireless
// cost of the task's packets.
double task_energy_j(double alpha_w, double e_pt_s, double beta_j_per_packet,
                     std::int64_t packets);

} // namespace madcloud::mw
