#include "madcloud/mw/cost.hpp"

#include <gtest/gtest.h>

#include "madcloud/mw/messages.hpp"

using namespace madcloud;
using namespace madcloud::mw;

namespace {

NodeSpec node_with(double cpi, double cct_s, double phi_s = 0.0) {
  NodeSpec n;
  n.cpi = cpi;
  n.cct_s = cct_s;
  n.phi_s = phi_s;
  return n;
}

} // namespace

TEST(ProcessingTime, ZeroInstructionsTakeNoTime) {
  EXPECT_DOUBLE_EQ(processing_time_s(0, 2.0, 1e-9), 0.0);
}

TEST(ProcessingTime, HandArithmetic) {
  EXPECT_NEAR(processing_time_s(1'000'000, 2.0, 1e-9), 2e-3, 1e-18);
}

TEST(ProcessingTime, LinearInCycleTime) {
  const double base = processing_time_s(12345, 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(processing_time_s(12345, 2.0, 2e-9), 2.0 * base);
}

TEST(QueueTime, IdleNodeWithEmptyQueuePaysTwoOverheads) {
  EXPECT_NEAR(queue_time_s(node_with(1.0, 1e-9, 1e-3), std::nullopt, {}), 2e-3, 1e-15);
}

TEST(QueueTime, ResidualOfHalfDoneTask) {
  const auto node = node_with(2.0, 1e-9, 0.0);
  ExecutingTask half{1'000'000, 500'000};
  EXPECT_NEAR(queue_time_s(node, half, {}), 1e-3, 1e-15);
}

TEST(QueueTime, QueuedTasksAndOverheadsAdd) {
  const auto node = node_with(1.0, 1e-9, 0.5);
  const std::int64_t queued[] = {1'000'000'000, 1'000'000'000}; // 1 s each
  EXPECT_NEAR(queue_time_s(node, std::nullopt, queued), 2.0 + 4.0 * 0.5, 1e-12);
}

TEST(CompletionTime, ZeroTransferEqualsExecution) {
  EXPECT_DOUBLE_EQ(completion_time_s(1.5, 0.5, 0.0), 2.0);
}

TEST(CompletionTime, Additivity) {
  EXPECT_DOUBLE_EQ(completion_time_s(1.5, 0.5, 0.5), 2.5);
}

TEST(CpuPower, StaticPlusSwitching) {
  // alpha = P_static + A C V^2 F
  EXPECT_NEAR(cpu_power_w(0.1, 10.0, 1e-10, 1.0, 1e9), 1.1, 1e-12);
}

TEST(TaskEnergy, HandArithmetic) {
  // alpha=1.1 W for 2 s plus 100 packets at 0.01 J.
  EXPECT_NEAR(task_energy_j(1.1, 2.0, 0.01, 100), 3.2, 1e-12);
}

TEST(TaskEnergy, ZeroChannelCostLeavesCpuTerm) {
  EXPECT_DOUBLE_EQ(task_energy_j(1.1, 2.0, 0.0, 12345), 2.2);
}

TEST(TaskEnergy, NothingCostsNothing) {
  EXPECT_DOUBLE_EQ(task_energy_j(1.1, 0.0, 0.01, 0), 0.0);
}

TEST(NodeSpec, AlphaDerivesFromPowerModel) {
  NodeSpec n;
  n.p_static_w = 0.1;
  n.active_gates = 10.0;
  n.capacitance_f = 1e-10;
  n.voltage_v = 1.0;
  n.frequency_hz = 1e9;
  EXPECT_NEAR(n.alpha_w(), 1.1, 1e-12);
  EXPECT_GE(n.alpha_w(), n.p_static_w);
}

// ---------------------------------------------------------------------------
// Control message wire layout

TEST(Messages, WireSizesFollowFieldLayout) {
  EXPECT_EQ(wire_size_bytes(Nim{}), 1 + 2 + 2 + 4 + 4);
  EXPECT_EQ(wire_size_bytes(Nirm{}), 1 + 2 + 2);
  EXPECT_EQ(wire_size_bytes(Nium{}), 1 + 2 + 4 + 4 + 4 + 2);
  Mim mim;
  mim.members.resize(3);
  EXPECT_EQ(wire_size_bytes(mim), 1 + 2 + 4 + 3 * (2 + 2 + 4));
  Mdirm mdirm;
  mdirm.member_ids = {1, 2};
  EXPECT_EQ(wire_size_bytes(mdirm), 1 + 2 + 2 + 2 * 2);
  EXPECT_EQ(wire_size_bytes(Mium{}), 1 + 2 + 2 + 4 + 4 + 4 + 2);
  Tim tim;
  tim.tasks.resize(4);
  EXPECT_EQ(wire_size_bytes(tim), 1 + 2 + 2 + 4 * (2 + 1));
}

TEST(Messages, TypeNamesAreStable) {
  EXPECT_STREQ(type_name(Nim{}), "NIM");
  EXPECT_STREQ(type_name(Tim{}), "TIM");
  EXPECT_STREQ(type_name(DiscoveryRequest{}), "DISC-REQ");
  EXPECT_STREQ(type_name(Hello{}), "HELLO");
}
