#include "madcloud/mw/messages.hpp"

namespace madcloud::mw {

namespace {

struct SizeVisitor {
  int operator()(const Nim&) const {
    return wire::kType + wire::kNodeId + wire::kCpi + wire::kCct + wire::kBroadcastId;
  }
  int operator()(const Nirm&) const { return wire::kType + 2 * wire::kNodeId; }
  int operator()(const Nium&) const {
    return wire::kType + 2 * wire::kNodeId + 3 * wire::kScalar;
  }
  int operator()(const Mim& m) const {
    return wire::kType + wire::kNodeId + wire::kBroadcastId +
           static_cast<int>(m.members.size()) * (wire::kNodeId + wire::kCpi + wire::kCct);
  }
  int operator()(const Mdirm& m) const {
    return wire::kType + 2 * wire::kNodeId + static_cast<int>(m.member_ids.size()) * wire::kNodeId;
  }
  int operator()(const Mium&) const {
    return wire::kType + 3 * wire::kNodeId + 3 * wire::kScalar;
  }
  int operator()(const Tim& m) const {
    return wire::kType + 2 * wire::kNodeId +
           static_cast<int>(m.tasks.size()) * (wire::kTaskId + wire::kStatus);
  }
  int operator()(const DiscoveryRequest&) const {
    return wire::kType + wire::kNodeId + wire::kTxPower + wire::kBroadcastId;
  }
  int operator()(const DiscoveryReply&) const {
    return wire::kType + 2 * wire::kNodeId + wire::kLevel;
  }
  int operator()(const Hello&) const { return wire::kType + wire::kNodeId + wire::kLevel; }
  int operator()(const TaskSubmit&) const {
    return wire::kType + 2 * wire::kNodeId + wire::kTaskId + wire::kInstructions +
           3 * wire::kScalar;
  }
  int operator()(const DispatchInstruction&) const {
    return wire::kType + 3 * wire::kNodeId + wire::kTaskId + wire::kStatus;
  }
  int operator()(const MigrationRequest&) const {
    return wire::kType + 2 * wire::kNodeId + wire::kTaskId + wire::kInstructions;
  }
  int operator()(const MigrationInstruction&) const {
    return wire::kType + 3 * wire::kNodeId + wire::kTaskId;
  }
  int operator()(const StatusReport&) const {
    return wire::kType + 2 * wire::kNodeId + wire::kTaskId + wire::kStatus;
  }
};

struct NameVisitor {
  const char* operator()(const Nim&) const { return "NIM"; }
  const char* operator()(const Nirm&) const { return "NIRM"; }
  const char* operator()(const Nium&) const { return "NIUM"; }
  const char* operator()(const Mim&) const { return "MIM"; }
  const char* operator()(const Mdirm&) const { return "MDIRM"; }
  const char* operator()(const Mium&) const { return "MIUM"; }
  const char* operator()(const Tim&) const { return "TIM"; }
  const char* operator()(const DiscoveryRequest&) const { return "DISC-REQ"; }
  const char* operator()(const DiscoveryReply&) const { return "DISC-REP"; }
  const char* operator()(const Hello&) const { return "HELLO"; }
  const char* operator()(const TaskSubmit&) const { return "SUBMIT"; }
  const char* operator()(const DispatchInstruction&) const { return "DISPATCH"; }
  const char* operator()(const MigrationRequest&) const { return "MIG-REQ"; }
  const char* operator()(const MigrationInstruction&) const { return "MIG-INST"; }
  const char* operator()(const StatusReport&) const { return "STATUS"; }
};

} // namespace

int wire_size_bytes(const ControlMessage& msg) { return std::visit(SizeVisitor{}, msg); }

const char* type_name(const ControlMessage& msg) { return std::visit(NameVisitor{}, msg); }

} // namespace madcloud::mw
