#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "madcloud/baselines/baselines.hpp"
#include "madcloud/mw/cost.hpp"
#include "madcloud/mw/messages.hpp"
#include "madcloud/mw/model.hpp"
#include "madcloud/mw/pool.hpp"
#include "madcloud/net/network.hpp"
#include "madcloud/sim/engine.hpp"
#include "madcloud/sim/trace.hpp"

namespace madcloud::mw {

enum class Scheme { Proposed, Hta, MinHop };

const char* to_string(Scheme scheme);

struct MiddlewareConfig {
  ProtocolTimers timers;
  double allocation_tick_s = 1.0;
  double monitor_period_s = 5.0;
  double submit_retry_s = 10.0;
  double output_retry_s = 5.0;
  double instruction_retry_s = 6.0; // re-send a dispatch instruction this long after silence
  int max_reallocations = 10;
  double blacklist_s = 60.0;
  // Migration triggers. Utilization bounds and the better-node margin are
  // disabled unless configured.
  bool migration_enabled = true;
  double migration_battery_frac = 0.10;
  bool migration_lifetime_check = true;
  double util_low = -1.0;
  double util_high = 2.0;
  double better_node_margin = -1.0;
  double migration_cooldown_s = 60.0;
  std::int64_t migration_state_bits = 8192;
};

struct AllocationResult {
  NodeId node = kNoNode;
  net::RouteEntry route;
  double e_dtt_s = 0.0;
  double e_ct_s = 0.0;
  double e_ec_j = 0.0;
};

// The allocation pass: walks the routing tables from the lowest power level
// up and, per node and route, estimates the completion time from the pool's
// reported state and the route's transfer time. Among pairs whose route
// lifetime covers the transfer it minimizes the estimated completion time,
// breaking ties toward the higher route lifetime probability and then walk
// order (lower level, lower node id). Entries are read as stored; refresh
// them first.
std::optional<AllocationResult> allocate(
    const TaskSpec& task, const ResourcePool& pool, const net::RoutingTableSet& tables,
    const net::PacketParams& packet, double now, const ProtocolTimers& timers,
    const std::function<bool(NodeId)>& is_candidate,
    const std::function<std::pair<double, double>(NodeId)>& alpha_beta = {});

// Everything above the network layer: resource pools, control messaging,
// the task queue at the master, dispatch, migration, and failure detection.
// One instance owns the middleware state of every node in the run.
class Middleware {
public:
  struct TaskRecord {
    TaskSpec spec;
    double submitted_at = 0.0;
    double completed_at = -1.0;
    double last_progress_at = 0.0;
    double last_instructed_at = 0.0;
    int reallocations = 0;
    int migrations = 0;
    bool known_to_master = false;
    std::map<NodeId, double> blacklist_until;
  };

  Middleware(sim::Engine& engine, net::Network& network, sim::Trace& trace,
             std::vector<NodeSpec> specs, Scheme scheme, MiddlewareConfig cfg, NodeId master);

  // Schedules the periodic protocol timers for every node.
  void start();

  // Consumer-side submission; the runner calls this at workload times.
  void submit(NodeId consumer, TaskSpec task);

  bool node_alive(NodeId n) const { return nodes_[static_cast<std::size_t>(n)].alive; }
  double battery_j(NodeId n) const { return nodes_[static_cast<std::size_t>(n)].battery_j; }

  const std::map<TaskId, TaskRecord>& tasks() const { return tasks_; }
  std::int64_t reallocations() const { return reallocations_; }
  std::int64_t migrations() const { return migrations_; }
  std::int64_t malformed_messages() const { return malformed_; }

  // Exposed for tests.
  void handle_message(NodeId receiver, const ControlMessage& msg, double rssi_dbm);
  double reported_queue_time_s(NodeId n) const;
  const ResourcePool& pool(NodeId n) const { return nodes_[static_cast<std::size_t>(n)].pool; }

private:
  struct LocalTask {
    TaskSpec spec;
    double arrived_at = 0.0;
  };

  struct NodeState {
    NodeSpec spec;
    double battery_j = 0.0;
    double battery_initial_j = 0.0;
    bool alive = true;
    ResourcePool pool;
    // Provider execution state.
    std::deque<LocalTask> queue;
    std::optional<LocalTask> executing;
    double exec_started_at = 0.0;  // instruction execution begins phi later
    double exec_finish_at = 0.0;
    std::uint64_t exec_epoch = 0;
    std::int64_t memory_used_bytes = 0;
    double busy_accum_s = 0.0;
    double busy_window_mark_s = 0.0;
    double utilization = 0.0;
    double last_migration_request = -1e18;
    // Snapshot backing the update-message thresholds.
    double nium_queue_s = 0.0;
    std::int64_t nium_memory = 0;
    double nium_battery = 0.0;
    std::uint32_t nim_seq = 0;
    std::uint32_t mim_seq = 0;
    double last_drain_at = 0.0;
    // Consumer bookkeeping.
    std::map<TaskId, bool> pending_submissions; // value: instruction received
    std::map<TaskId, bool> transfer_active;
    std::map<TaskId, int> shipped_attempt; // dedupes re-sent instructions
  };

  NodeState& node(NodeId n) { return nodes_[static_cast<std::size_t>(n)]; }
  const NodeState& node(NodeId n) const { return nodes_[static_cast<std::size_t>(n)]; }

  void set_status(TaskRecord& rec, TaskStatus to, NodeId where);
  void schedule_node_timers(NodeId n);
  void nim_tick(NodeId n);
  void mim_tick(NodeId n);
  void tim_tick(NodeId n);
  void monitor_tick(NodeId n);
  void allocation_tick();
  void detect_failures();

  void maybe_send_nium(NodeId n);
  void drain_battery(NodeId n, double joules);
  void kill_node(NodeId n);

  // Provider execution.
  void task_arrived(NodeId provider, const TaskSpec& task, bool resumed);
  void try_start(NodeId provider);
  void finish_execution(NodeId provider, std::uint64_t epoch);
  std::int64_t executed_in_segment(const NodeState& st) const;
  std::optional<TaskSpec> close_segment(NodeId provider, std::int64_t instructions);
  void send_output(NodeId provider, TaskSpec task);
  void cancel_local(NodeId provider, TaskId task);

  // Master-side flow.
  void dispatch(TaskRecord& rec, NodeId target);
  void handle_submit(const TaskSubmit& msg);
  void handle_status_report(const StatusReport& msg);
  void handle_migration_request(const MigrationRequest& msg);
  void begin_migration(NodeId provider, TaskId task, NodeId target);
  std::optional<AllocationResult> run_allocator(const TaskRecord& rec, NodeId exclude);
  bool check_migration_triggers(NodeId provider);

  sim::Engine& engine_;
  net::Network& network_;
  sim::Trace& trace_;
  Scheme scheme_;
  MiddlewareConfig cfg_;
  NodeId master_;
  std::vector<NodeState> nodes_;
  std::map<TaskId, TaskRecord> tasks_;

  std::int64_t reallocations_ = 0;
  std::int64_t migrations_ = 0;
  std::int64_t malformed_ = 0;
};

} // namespace madcloud::mw
