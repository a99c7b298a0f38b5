#include "madcloud/mw/cost.hpp"

namespace madcloud::mw {

double processing_time_s(std::int64_t instructions, double cpi, double cct_s) {
  return static_cast<double>(instructions) * cpi * cct_s;
}

double residual_time_s(std::int64_t instructions, std::int64_t executed, double cpi,
                       double cct_s) {
  return static_cast<double>(instructions - executed) * cpi * cct_s;
}

double queue_time_s(const NodeSpec& node, const std::optional<ExecutingTask>& executing,
                    std::span<const std::int64_t> queued_instructions) {
  double t = 0.0;
  if (executing) {
    t += residual_time_s(executing->instructions, executing->executed, node.cpi, node.cct_s);
  }
  for (std::int64_t instructions : queued_instructions) {
    t += processing_time_s(instructions, node.cpi, node.cct_s);
  }
  const auto m = static_cast<double>(queued_instructions.size());
  return t + (m + 2.0) * node.phi_s;
}

double cpu_power_w(double p_static_w, double active_gates, double capacitance_f, double voltage_v,
                   double frequency_hz) {
  return p_static_w + active_gates * capacitance_f * voltage_v * voltage_v * frequency_hz;
}

double task_energy_j(double alpha_w, double e_pt_s, double beta_j_per_packet,
                     std::int64_t packets) {
  return alpha_w * e_pt_s + beta_j_per_packet * static_cast<double>(packets);
}

} // namespace madcloud::mw
