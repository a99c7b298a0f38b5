#include "madcloud/mw/middleware.hpp"

#include <algorithm>
#include <cmath>

namespace madcloud::mw {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Hta: return "hta";
    case Scheme::MinHop: return "minhop";
  }
  return "?";
}

std::optional<AllocationResult> allocate(
    const TaskSpec& task, const ResourcePool& pool, const net::RoutingTableSet& tables,
    const net::PacketParams& packet, double now, const ProtocolTimers& timers,
    const std::function<bool(NodeId)>& is_candidate,
    const std::function<std::pair<double, double>(NodeId)>& alpha_beta) {
  // Qualify each (node, route) pair by the lifetime constraint, then take the
  // minimum estimated completion time; ties go to the higher route lifetime
  // probability, then the lower power level and node id by walk order.
  std::optional<AllocationResult> best;
  double best_ct = net::kInfiniteTime;
  double best_p = 0.0;
  const std::int64_t dispatch_bits = task.code_bits + task.input_bits;

  for (int level = 0; level < tables.level_count(); ++level) {
    for (const auto& [dest, routes] : tables.table(level)) {
      if (is_candidate && !is_candidate(dest)) continue;
      const ResourcePoolEntry* entry = pool.find(dest);
      if (!entry || !entry->fresh(now, timers)) continue;
      const double e_pt = processing_time_s(task.instructions, entry->cpi, entry->cct_s);
      const double e_qt = entry->effective_queue_time_s(now);
      for (const auto& route : routes) {
        const double e_dtt = net::estimate_dtt_s(dispatch_bits, route, packet) +
                             net::estimate_dtt_s(task.output_bits, route, packet);
        if (route.predicted_lifetime_s < e_dtt) continue;
        const double e_ct = completion_time_s(e_pt, e_qt, e_dtt);
        const bool better =
            e_ct < best_ct || (e_ct == best_ct && route.lifetime_probability > best_p);
        if (!better) continue;
        AllocationResult r;
        r.node = dest;
        r.route = route;
        r.e_dtt_s = e_dtt;
        r.e_ct_s = e_ct;
        if (alpha_beta) {
          const auto [alpha, beta] = alpha_beta(dest);
          r.e_ec_j = task_energy_j(alpha, e_pt, beta, task_packets(task, packet));
        }
        best = r;
        best_ct = e_ct;
        best_p = route.lifetime_probability;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

Middleware::Middleware(sim::Engine& engine, net::Network& network, sim::Trace& trace,
                       std::vector<NodeSpec> specs, Scheme scheme, MiddlewareConfig cfg,
                       NodeId master)
    : engine_(engine),
      network_(network),
      trace_(trace),
      scheme_(scheme),
      cfg_(std::move(cfg)),
      master_(master) {
  nodes_.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    nodes_[i].spec = specs[i];
    nodes_[i].battery_j = specs[i].battery_j;
    nodes_[i].battery_initial_j = specs[i].battery_j;
  }
  network_.set_message_handler(
      [this](NodeId receiver, const ControlMessage& msg, double rssi) {
        handle_message(receiver, msg, rssi);
      });
  network_.set_alive_fn([this](NodeId n) { return nodes_[static_cast<std::size_t>(n)].alive; });
  network_.set_energy_sink([this](NodeId n, double joules) { drain_battery(n, joules); });
}

void Middleware::set_status(TaskRecord& rec, TaskStatus to, NodeId where) {
  trace_.task({engine_.now(), rec.spec.task_id, rec.spec.status, to, where});
  rec.spec.status = to;
}

void Middleware::start() {
  const int n = static_cast<int>(nodes_.size());
  for (NodeId i = 0; i < n; ++i) schedule_node_timers(i);
  auto alloc_tick = [this](auto&& self) -> void {
    if (node(master_).alive) allocation_tick();
    engine_.schedule(engine_.now() + cfg_.allocation_tick_s, sim::EventKind::Timer,
                     [self]() { self(self); });
  };
  engine_.schedule(engine_.now() + cfg_.allocation_tick_s, sim::EventKind::Timer,
                   [alloc_tick]() { alloc_tick(alloc_tick); });
}

void Middleware::schedule_node_timers(NodeId n) {
  const double stagger =
      (static_cast<double>(n) + 1.0) / (static_cast<double>(nodes_.size()) + 1.0);
  auto periodic = [this](double period, double offset, auto body) {
    auto tick = [this, period, body](auto&& self) -> void {
      body();
      engine_.schedule(engine_.now() + period, sim::EventKind::Timer, [self]() { self(self); });
    };
    engine_.schedule(engine_.now() + offset, sim::EventKind::Timer, [tick]() { tick(tick); });
  };
  periodic(cfg_.timers.nim_period_s, cfg_.timers.nim_period_s * stagger,
           [this, n]() { nim_tick(n); });
  periodic(cfg_.timers.mim_period_s, cfg_.timers.mim_period_s * stagger,
           [this, n]() { mim_tick(n); });
  periodic(cfg_.timers.tim_period_s, cfg_.timers.tim_period_s * stagger,
           [this, n]() { tim_tick(n); });
  periodic(cfg_.monitor_period_s, cfg_.monitor_period_s * stagger,
           [this, n]() { monitor_tick(n); });
}

// ---------------------------------------------------------------------------
// Periodic protocol behavior

void Middleware::nim_tick(NodeId n) {
  NodeState& st = node(n);
  if (!st.alive) return;
  network_.broadcast(n, network_.params().radio.max_level(),
                     Nim{n, st.spec.cpi, st.spec.cct_s, st.nim_seq++});
}

void Middleware::mim_tick(NodeId n) {
  NodeState& st = node(n);
  if (!st.alive) return;
  Mim mim;
  mim.node_id = n;
  mim.broadcast_id = st.mim_seq++;
  for (const auto& [id, entry] : st.pool.entries()) {
    if (id == n) continue;
    mim.members.push_back(MimMember{id, entry.cpi, entry.cct_s});
  }
  if (mim.members.empty()) return;
  network_.broadcast(n, network_.params().radio.max_level(), mim);
}

void Middleware::tim_tick(NodeId n) {
  NodeState& st = node(n);
  if (!st.alive || n == master_) return;
  Tim tim;
  tim.node_id = n;
  tim.dst = master_;
  if (st.executing) tim.tasks.push_back({st.executing->spec.task_id, TaskStatus::Executing});
  for (const auto& t : st.queue) tim.tasks.push_back({t.spec.task_id, TaskStatus::Dispatched});
  if (tim.tasks.empty()) return;
  network_.unicast(n, master_, tim);
}

void Middleware::monitor_tick(NodeId n) {
  NodeState& st = node(n);
  if (!st.alive) return;
  // Static power burns continuously; the dynamic share is charged per
  // execution segment.
  drain_battery(n, st.spec.p_static_w * (engine_.now() - st.last_drain_at));
  st.last_drain_at = engine_.now();
  if (!st.alive) return;

  const double window = engine_.now() <= 0.0 ? 1.0 : cfg_.monitor_period_s;
  double busy = st.busy_accum_s;
  if (st.executing) busy += engine_.now() - std::min(engine_.now(), st.exec_started_at);
  st.utilization = std::clamp((busy - st.busy_window_mark_s) / window, 0.0, 1.0);
  st.busy_window_mark_s = busy;

  st.pool.evict_stale(engine_.now(), cfg_.timers);
  maybe_send_nium(n);

  if (scheme_ == Scheme::Proposed && cfg_.migration_enabled && st.executing && n != master_) {
    if (check_migration_triggers(n)) {
      if (engine_.now() - st.last_migration_request >= cfg_.migration_cooldown_s) {
        st.last_migration_request = engine_.now();
        network_.unicast(n, master_,
                         MigrationRequest{n, master_, st.executing->spec.task_id,
                                          st.executing->spec.executed_instructions +
                                              executed_in_segment(st)});
      }
    }
  }
}

bool Middleware::check_migration_triggers(NodeId n) {
  NodeState& st = node(n);
  if (!st.executing) return false;
  if (st.battery_j < cfg_.migration_battery_frac * st.battery_initial_j) return true;
  if (st.utilization > cfg_.util_high || st.utilization < cfg_.util_low) return true;

  const std::int64_t executed =
      st.executing->spec.executed_instructions + executed_in_segment(st);
  const double remaining =
      residual_time_s(st.executing->spec.instructions, executed, st.spec.cpi, st.spec.cct_s);

  if (cfg_.migration_lifetime_check) {
    // The serving route carries the result back to the consumer.
    auto sel = network_.select(n, st.executing->spec.consumer, st.executing->spec.output_bits);
    if (!sel || sel->entry.predicted_lifetime_s < remaining) return true;
  }

  if (cfg_.better_node_margin > 0.0) {
    TaskSpec probe = st.executing->spec;
    probe.instructions = probe.instructions - executed;
    auto alt = allocate(probe, st.pool, network_.tables(n), network_.params().cfg.packet,
                        engine_.now(), cfg_.timers,
                        [&](NodeId c) { return c != n && c != master_; });
    if (alt && alt->e_ct_s < (1.0 - cfg_.better_node_margin) * remaining) return true;
  }
  return false;
}

void Middleware::maybe_send_nium(NodeId n) {
  NodeState& st = node(n);
  if (!st.alive) return;
  const double queue_s = reported_queue_time_s(n);
  const std::int64_t memory =
      std::max<std::int64_t>(0, st.spec.memory_bytes - st.memory_used_bytes);
  const double battery = st.battery_j;

  auto crossed = [&](double prev, double cur) {
    if (prev == cur) return false;
    if (prev == 0.0) return cur != 0.0;
    return std::abs(cur - prev) / std::abs(prev) > cfg_.timers.nium_threshold;
  };
  if (crossed(st.nium_queue_s, queue_s) ||
      crossed(static_cast<double>(st.nium_memory), static_cast<double>(memory)) ||
      crossed(st.nium_battery, battery)) {
    st.nium_queue_s = queue_s;
    st.nium_memory = memory;
    st.nium_battery = battery;
    network_.broadcast(n, network_.params().radio.max_level(),
                       Nium{n, queue_s, memory, battery, kNoNode});
  }
}

double Middleware::reported_queue_time_s(NodeId n) const {
  const NodeState& st = node(n);
  std::optional<ExecutingTask> executing;
  if (st.executing) {
    executing = ExecutingTask{st.executing->spec.instructions,
                              st.executing->spec.executed_instructions + executed_in_segment(st)};
  }
  std::vector<std::int64_t> queued;
  queued.reserve(st.queue.size());
  for (const auto& t : st.queue) queued.push_back(t.spec.instructions);
  return queue_time_s(st.spec, executing, queued);
}

void Middleware::drain_battery(NodeId n, double joules) {
  NodeState& st = node(n);
  if (!st.alive) return;
  st.battery_j -= joules;
  if (st.battery_j <= 0.0) {
    st.battery_j = 0.0;
    kill_node(n);
  }
}

void Middleware::kill_node(NodeId n) {
  NodeState& st = node(n);
  if (!st.alive) return;
  st.alive = false;
  // Execution stops where it stands; the lease at the master will notice.
  if (st.executing) close_segment(n, executed_in_segment(st));
  st.queue.clear();
  st.memory_used_bytes = 0;
}

// ---------------------------------------------------------------------------
// Consumer side

void Middleware::submit(NodeId consumer, TaskSpec task) {
  task.consumer = consumer;
  task.status = TaskStatus::Queued;
  TaskRecord rec;
  rec.spec = task;
  rec.submitted_at = engine_.now();
  rec.last_progress_at = engine_.now();
  tasks_[task.task_id] = rec;
  node(consumer).pending_submissions[task.task_id] = false;

  auto send_submit = [this, consumer, task](auto&& self) -> void {
    NodeState& st = node(consumer);
    auto it = st.pending_submissions.find(task.task_id);
    if (it == st.pending_submissions.end() || it->second || !st.alive) return;
    network_.unicast(consumer, master_,
                     TaskSubmit{consumer, master_, task.task_id, task.instructions,
                                task.code_bits, task.input_bits, task.output_bits});
    engine_.schedule(engine_.now() + cfg_.submit_retry_s, sim::EventKind::Timer,
                     [self]() { self(self); });
  };
  send_submit(send_submit);
}

// ---------------------------------------------------------------------------
// Message handling

void Middleware::handle_message(NodeId receiver, const ControlMessage& msg, double rssi_dbm) {
  NodeState& st = node(receiver);
  if (!st.alive) return;
  const int node_count = static_cast<int>(nodes_.size());
  auto valid_node = [&](NodeId id) { return id >= 0 && id < node_count; };
  const double max_tx_dbm =
      network_.params().radio.levels[static_cast<std::size_t>(network_.params().radio.max_level())]
          .tx_power_dbm;

  if (const auto* nim = std::get_if<Nim>(&msg)) {
    if (!valid_node(nim->node_id) || nim->cpi <= 0.0 || nim->cct_s <= 0.0) {
      ++malformed_;
      return;
    }
    const bool known = st.pool.contains(nim->node_id);
    auto& entry = st.pool.upsert(nim->node_id);
    entry.cpi = nim->cpi;
    entry.cct_s = nim->cct_s;
    entry.last_nim_at = engine_.now();
    entry.available = true;
    if (!known) {
      if (auto level = network_.reply_level(max_tx_dbm, rssi_dbm)) {
        network_.send_direct(receiver, nim->node_id, *level, Nirm{receiver, nim->node_id});
      }
    }
    return;
  }
  if (const auto* nirm = std::get_if<Nirm>(&msg)) {
    if (!valid_node(nirm->src)) {
      ++malformed_;
      return;
    }
    const std::int64_t memory =
        std::max<std::int64_t>(0, st.spec.memory_bytes - st.memory_used_bytes);
    if (auto level = network_.reply_level(max_tx_dbm, rssi_dbm)) {
      network_.send_direct(receiver, nirm->src, *level,
                           Nium{receiver, reported_queue_time_s(receiver), memory, st.battery_j,
                                nirm->src});
    }
    return;
  }
  if (const auto* nium = std::get_if<Nium>(&msg)) {
    if (!valid_node(nium->node_id)) {
      ++malformed_;
      return;
    }
    if (auto* entry = st.pool.find(nium->node_id)) {
      entry->queue_waiting_time_s = nium->queue_waiting_time_s;
      entry->memory_available_bytes = nium->memory_bytes;
      entry->battery_available_j = nium->battery_j;
      entry->has_dynamic = true;
      entry->queue_bump_s = 0.0; // the report supersedes local aging
    }
    return;
  }
  if (const auto* mim = std::get_if<Mim>(&msg)) {
    if (!valid_node(mim->node_id)) {
      ++malformed_;
      return;
    }
    Mdirm req{receiver, mim->node_id, {}};
    for (const auto& member : mim->members) {
      if (!valid_node(member.member_id) || member.member_id == receiver) continue;
      if (!st.pool.contains(member.member_id)) {
        auto& entry = st.pool.upsert(member.member_id);
        entry.cpi = member.cpi;
        entry.cct_s = member.cct_s;
        req.member_ids.push_back(member.member_id);
      }
    }
    if (!req.member_ids.empty()) {
      if (auto level = network_.reply_level(max_tx_dbm, rssi_dbm)) {
        network_.send_direct(receiver, mim->node_id, *level, req);
      }
    }
    return;
  }
  if (const auto* mdirm = std::get_if<Mdirm>(&msg)) {
    if (!valid_node(mdirm->src)) {
      ++malformed_;
      return;
    }
    for (NodeId member : mdirm->member_ids) {
      if (!valid_node(member)) continue;
      const auto* entry = st.pool.find(member);
      if (!entry || !entry->has_dynamic) continue;
      if (auto level = network_.reply_level(max_tx_dbm, rssi_dbm)) {
        network_.send_direct(receiver, mdirm->src, *level,
                             Mium{receiver, member, entry->queue_waiting_time_s,
                                  entry->memory_available_bytes, entry->battery_available_j,
                                  mdirm->src});
      }
    }
    return;
  }
  if (const auto* mium = std::get_if<Mium>(&msg)) {
    if (!valid_node(mium->member_id)) {
      ++malformed_;
      return;
    }
    if (auto* entry = st.pool.find(mium->member_id)) {
      entry->queue_waiting_time_s = mium->queue_waiting_time_s;
      entry->memory_available_bytes = mium->memory_bytes;
      entry->battery_available_j = mium->battery_j;
      entry->has_dynamic = true;
      entry->queue_bump_s = 0.0;
    }
    return;
  }
  if (const auto* tim = std::get_if<Tim>(&msg)) {
    if (receiver != master_) return;
    for (const auto& t : tim->tasks) {
      auto it = tasks_.find(t.task_id);
      if (it == tasks_.end()) {
        ++malformed_;
        continue;
      }
      if (it->second.spec.assigned_node == tim->node_id) {
        it->second.last_progress_at = engine_.now();
      }
    }
    return;
  }
  if (const auto* submit_msg = std::get_if<TaskSubmit>(&msg)) {
    if (receiver == master_) handle_submit(*submit_msg);
    return;
  }
  if (const auto* inst = std::get_if<DispatchInstruction>(&msg)) {
    // Consumer: ship code and input data to the selected provider.
    auto rec_it = tasks_.find(inst->task_id);
    if (rec_it == tasks_.end() || !valid_node(inst->target)) {
      ++malformed_;
      return;
    }
    auto& pending = st.pending_submissions;
    if (auto it = pending.find(inst->task_id); it != pending.end()) it->second = true;
    if (st.transfer_active[inst->task_id]) return;
    if (auto it = st.shipped_attempt.find(inst->task_id);
        it != st.shipped_attempt.end() && it->second == inst->attempt) {
      return; // duplicate instruction for an already shipped attempt
    }
    st.transfer_active[inst->task_id] = true;
    const TaskSpec spec = rec_it->second.spec;
    const NodeId target = inst->target;
    network_.transfer(
        receiver, target, spec.code_bits + spec.input_bits, "data",
        [this, receiver, target, task_id = inst->task_id,
         attempt = inst->attempt](const net::TransferOutcome& out) {
          node(receiver).transfer_active[task_id] = false;
          auto it = tasks_.find(task_id);
          if (it == tasks_.end()) return;
          TaskRecord& rec = it->second;
          if (rec.spec.status != TaskStatus::Dispatched || rec.spec.assigned_node != target) {
            return; // superseded by a newer decision
          }
          if (out.success && node_alive(target)) {
            node(receiver).shipped_attempt[task_id] = attempt;
            task_arrived(target, rec.spec, false);
          } else {
            // Report the failed dispatch so the master can re-queue.
            network_.unicast(receiver, master_,
                             StatusReport{receiver, master_, task_id, TaskStatus::Failed});
          }
        });
    return;
  }
  if (const auto* mig_req = std::get_if<MigrationRequest>(&msg)) {
    if (receiver == master_) handle_migration_request(*mig_req);
    return;
  }
  if (const auto* mig_inst = std::get_if<MigrationInstruction>(&msg)) {
    begin_migration(receiver, mig_inst->task_id, mig_inst->target);
    return;
  }
  if (const auto* report = std::get_if<StatusReport>(&msg)) {
    if (receiver == master_) handle_status_report(*report);
    return;
  }
}

// ---------------------------------------------------------------------------
// Master-side flow

void Middleware::handle_submit(const TaskSubmit& msg) {
  auto it = tasks_.find(msg.task_id);
  if (it == tasks_.end()) {
    ++malformed_;
    return;
  }
  it->second.known_to_master = true;
}

void Middleware::handle_status_report(const StatusReport& msg) {
  auto it = tasks_.find(msg.task_id);
  if (it == tasks_.end()) {
    ++malformed_;
    return;
  }
  TaskRecord& rec = it->second;
  rec.last_progress_at = engine_.now();
  if (msg.status == TaskStatus::Failed && rec.spec.status == TaskStatus::Dispatched) {
    // Dispatch transfer failed: back to the queue, avoid the node for a while.
    rec.blacklist_until[rec.spec.assigned_node] = engine_.now() + cfg_.blacklist_s;
    rec.spec.assigned_node = kNoNode;
    ++rec.reallocations;
    ++reallocations_;
    set_status(rec, TaskStatus::Queued, master_);
    // Retry right away rather than waiting out the allocation tick.
    if (auto result = run_allocator(rec, kNoNode)) dispatch(rec, result->node);
  }
  // Completion reports only synchronize the master's view; the record was
  // already closed when the result reached the consumer.
}

void Middleware::allocation_tick() {
  detect_failures();
  // Instructions can get lost; nudge dispatches that show no progress.
  for (auto& [id, rec] : tasks_) {
    if (rec.spec.status != TaskStatus::Dispatched) continue;
    const double idle_since = std::max(rec.last_progress_at, rec.last_instructed_at);
    if (engine_.now() - idle_since > cfg_.instruction_retry_s) {
      rec.last_instructed_at = engine_.now();
      network_.unicast(master_, rec.spec.consumer,
                       DispatchInstruction{master_, rec.spec.consumer, rec.spec.task_id,
                                           rec.spec.assigned_node, rec.reallocations});
    }
  }
  // Queued tasks in submission order.
  std::vector<TaskRecord*> queued;
  for (auto& [id, rec] : tasks_) {
    if (rec.known_to_master && rec.spec.status == TaskStatus::Queued) queued.push_back(&rec);
  }
  std::sort(queued.begin(), queued.end(), [](const TaskRecord* a, const TaskRecord* b) {
    if (a->submitted_at != b->submitted_at) return a->submitted_at < b->submitted_at;
    return a->spec.task_id < b->spec.task_id;
  });
  for (TaskRecord* rec : queued) {
    auto result = run_allocator(*rec, kNoNode);
    if (!result) continue; // stays queued, retried next tick
    dispatch(*rec, result->node);
  }
}

std::optional<AllocationResult> Middleware::run_allocator(const TaskRecord& rec, NodeId exclude) {
  NodeState& smn = node(master_);
  const double now = engine_.now();
  auto is_candidate = [&](NodeId id) {
    if (id == exclude || id == master_ || id == rec.spec.consumer) return false;
    if (node(id).spec.role != Role::Provider) return false;
    auto bl = rec.blacklist_until.find(id);
    if (bl != rec.blacklist_until.end() && now < bl->second) return false;
    return true;
  };

  if (scheme_ == Scheme::Proposed) {
    // Refresh route metrics for every pool member before the table walk.
    for (const auto& [id, entry] : smn.pool.entries()) {
      if (is_candidate(id)) network_.refresh_entries(master_, id);
    }
    auto alpha_beta = [&](NodeId id) {
      const NodeSpec& spec = node(id).spec;
      return std::make_pair(spec.alpha_w(), spec.beta_j_per_packet);
    };
    return allocate(rec.spec, smn.pool, network_.tables(master_), network_.params().cfg.packet,
                    now, cfg_.timers, is_candidate, alpha_beta);
  }

  if (scheme_ == Scheme::Hta) {
    std::vector<baselines::HtaCandidate> candidates;
    for (const auto& [id, entry] : smn.pool.entries()) {
      if (!is_candidate(id) || !entry.fresh(now, cfg_.timers)) continue;
      candidates.push_back(
          baselines::HtaCandidate{id, entry.cpi, entry.cct_s, entry.battery_available_j});
    }
    auto pick = baselines::hta_allocate(candidates);
    if (!pick) return std::nullopt;
    AllocationResult r;
    r.node = *pick;
    return r;
  }

  // MinHop: fewest hops from the submitting consumer at maximum power.
  const auto adjacency = network_.max_power_adjacency();
  const auto hops = baselines::hop_counts(adjacency, rec.spec.consumer);
  std::vector<baselines::MinHopCandidate> candidates;
  for (const auto& [id, entry] : smn.pool.entries()) {
    if (!is_candidate(id) || !entry.fresh(now, cfg_.timers)) continue;
    if (hops[static_cast<std::size_t>(id)] < 0) continue;
    candidates.push_back(baselines::MinHopCandidate{id, hops[static_cast<std::size_t>(id)]});
  }
  auto pick = baselines::minhop_allocate(candidates);
  if (!pick) return std::nullopt;
  AllocationResult r;
  r.node = *pick;
  return r;
}

void Middleware::dispatch(TaskRecord& rec, NodeId target) {
  rec.spec.assigned_node = target;
  rec.last_progress_at = engine_.now();
  rec.last_instructed_at = engine_.now();
  set_status(rec, TaskStatus::Dispatched, target);
  // Locally age the pool entry so a burst of allocations in one tick does not
  // pile onto the same node while its next update message is pending.
  NodeState& smn = node(master_);
  if (auto* entry = smn.pool.find(target)) {
    entry->add_queue_bump(engine_.now(),
                          processing_time_s(rec.spec.instructions, entry->cpi, entry->cct_s) +
                              2.0 * node(target).spec.phi_s);
  }
  network_.unicast(master_, rec.spec.consumer,
                   DispatchInstruction{master_, rec.spec.consumer, rec.spec.task_id, target,
                                       rec.reallocations});
}

void Middleware::detect_failures() {
  const double lease =
      cfg_.timers.failure_grace_multiplier * cfg_.timers.tim_period_s;
  for (auto& [id, rec] : tasks_) {
    const auto status = rec.spec.status;
    if (status != TaskStatus::Dispatched && status != TaskStatus::Executing &&
        status != TaskStatus::Migrating) {
      continue;
    }
    if (engine_.now() - rec.last_progress_at <= lease) continue;
    // The provider fell silent: abandon the attempt on both sides.
    if (rec.spec.assigned_node != kNoNode) {
      cancel_local(rec.spec.assigned_node, id);
      rec.blacklist_until[rec.spec.assigned_node] = engine_.now() + cfg_.blacklist_s;
    }
    set_status(rec, TaskStatus::Failed, rec.spec.assigned_node);
    rec.spec.assigned_node = kNoNode;
    if (rec.reallocations < cfg_.max_reallocations) {
      ++rec.reallocations;
      ++reallocations_;
      rec.spec.executed_instructions = 0; // restart from scratch
      rec.last_progress_at = engine_.now();
      set_status(rec, TaskStatus::Queued, master_);
    }
  }
}

// ---------------------------------------------------------------------------
// Provider execution

void Middleware::task_arrived(NodeId provider, const TaskSpec& task, bool resumed) {
  NodeState& st = node(provider);
  if (!st.alive) return;
  if (st.executing && st.executing->spec.task_id == task.task_id) return;
  for (const auto& queued : st.queue) {
    if (queued.spec.task_id == task.task_id) return; // duplicate shipment
  }
  auto it = tasks_.find(task.task_id);
  if (it == tasks_.end()) return;
  TaskRecord& rec = it->second;
  rec.last_progress_at = engine_.now();
  LocalTask local;
  local.spec = rec.spec;
  local.arrived_at = engine_.now();
  st.memory_used_bytes += rec.spec.total_bits() / 8;
  if (resumed) {
    st.queue.push_front(local);
  } else {
    st.queue.push_back(local);
  }
  maybe_send_nium(provider);
  try_start(provider);
}

void Middleware::try_start(NodeId provider) {
  NodeState& st = node(provider);
  if (!st.alive || st.executing || st.queue.empty()) return;
  st.executing = st.queue.front();
  st.queue.pop_front();
  const std::int64_t remaining =
      st.executing->spec.instructions - st.executing->spec.executed_instructions;
  st.exec_started_at = engine_.now();
  const double run_s = 2.0 * st.spec.phi_s +
                       processing_time_s(remaining, st.spec.cpi, st.spec.cct_s);
  st.exec_finish_at = engine_.now() + run_s;
  const std::uint64_t epoch = ++st.exec_epoch;
  auto it = tasks_.find(st.executing->spec.task_id);
  if (it != tasks_.end()) {
    set_status(it->second, TaskStatus::Executing, provider);
    it->second.last_progress_at = engine_.now();
  }
  engine_.schedule(st.exec_finish_at, sim::EventKind::TaskProgress,
                   [this, provider, epoch]() { finish_execution(provider, epoch); });
  maybe_send_nium(provider);
}

std::int64_t Middleware::executed_in_segment(const NodeState& st) const {
  if (!st.executing) return 0;
  const double instr_start = st.exec_started_at + st.spec.phi_s;
  const double elapsed = engine_.now() - instr_start;
  if (elapsed <= 0.0) return 0;
  const auto done = static_cast<std::int64_t>(elapsed / (st.spec.cpi * st.spec.cct_s));
  const std::int64_t remaining =
      st.executing->spec.instructions - st.executing->spec.executed_instructions;
  return std::clamp<std::int64_t>(done, 0, remaining);
}

// Records the execution segment, clears the executing slot, and charges the
// dynamic CPU energy. Clearing first keeps a battery-death inside the drain
// from closing the same segment twice. Returns the frozen task image.
std::optional<TaskSpec> Middleware::close_segment(NodeId provider, std::int64_t instructions) {
  NodeState& st = node(provider);
  if (!st.executing) return std::nullopt;
  TaskSpec image = st.executing->spec;
  image.executed_instructions += instructions;
  trace_.exec({engine_.now(), image.task_id, provider, instructions});
  st.busy_accum_s += engine_.now() - st.exec_started_at;
  st.executing.reset();
  ++st.exec_epoch;
  drain_battery(provider,
                (st.spec.alpha_w() - st.spec.p_static_w) * (engine_.now() - st.exec_started_at));
  return image;
}

void Middleware::finish_execution(NodeId provider, std::uint64_t epoch) {
  NodeState& st = node(provider);
  if (!st.alive || !st.executing || st.exec_epoch != epoch) return;
  const std::int64_t segment =
      st.executing->spec.instructions - st.executing->spec.executed_instructions;
  auto done = close_segment(provider, segment);
  if (!st.alive || !done) return; // the dynamic drain may have killed the node
  st.memory_used_bytes = std::max<std::int64_t>(0, st.memory_used_bytes - done->total_bits() / 8);
  auto it = tasks_.find(done->task_id);
  if (it != tasks_.end()) {
    it->second.spec.executed_instructions = done->instructions;
    it->second.last_progress_at = engine_.now();
  }
  send_output(provider, *done);
  maybe_send_nium(provider);
  try_start(provider);
}

void Middleware::send_output(NodeId provider, TaskSpec task) {
  if (!node(provider).alive) return;
  network_.transfer(
      provider, task.consumer, task.output_bits, "data",
      [this, provider, task](const net::TransferOutcome& out) {
        auto it = tasks_.find(task.task_id);
        if (it == tasks_.end()) return;
        TaskRecord& rec = it->second;
        if (out.success) {
          if (rec.spec.status == TaskStatus::Executing && rec.spec.assigned_node == provider) {
            rec.completed_at = engine_.now();
            set_status(rec, TaskStatus::Completed, provider);
            network_.unicast(task.consumer, master_,
                             StatusReport{task.consumer, master_, task.task_id,
                                          TaskStatus::Completed});
          }
          return;
        }
        // Result undeliverable right now: keep trying while the task is ours.
        if (rec.spec.status == TaskStatus::Executing && rec.spec.assigned_node == provider &&
            node(provider).alive) {
          engine_.schedule(engine_.now() + cfg_.output_retry_s, sim::EventKind::Timer,
                           [this, provider, task]() { send_output(provider, task); });
        }
      });
}

void Middleware::cancel_local(NodeId provider, TaskId task) {
  NodeState& st = node(provider);
  if (st.executing && st.executing->spec.task_id == task) {
    auto image = close_segment(provider, executed_in_segment(st));
    if (image) {
      st.memory_used_bytes =
          std::max<std::int64_t>(0, st.memory_used_bytes - image->total_bits() / 8);
    }
    try_start(provider);
    return;
  }
  for (auto it = st.queue.begin(); it != st.queue.end(); ++it) {
    if (it->spec.task_id == task) {
      st.memory_used_bytes =
          std::max<std::int64_t>(0, st.memory_used_bytes - it->spec.total_bits() / 8);
      st.queue.erase(it);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Migration

void Middleware::handle_migration_request(const MigrationRequest& msg) {
  auto it = tasks_.find(msg.task_id);
  if (it == tasks_.end()) {
    ++malformed_;
    return;
  }
  TaskRecord& rec = it->second;
  if (rec.spec.status != TaskStatus::Executing || rec.spec.assigned_node != msg.src) return;
  rec.last_progress_at = engine_.now();
  // Allocate for the remaining work only, and move only when the target
  // actually beats letting the source finish.
  TaskRecord probe = rec;
  probe.spec.instructions =
      std::max<std::int64_t>(0, rec.spec.instructions - msg.executed_instructions);
  probe.spec.executed_instructions = 0;
  auto target = run_allocator(probe, msg.src);
  if (!target) return; // no candidate: the task continues where it is
  const NodeSpec& src_spec = node(msg.src).spec;
  const double residual_on_src =
      residual_time_s(rec.spec.instructions, msg.executed_instructions, src_spec.cpi,
                      src_spec.cct_s);
  if (scheme_ == Scheme::Proposed && target->e_ct_s >= residual_on_src) return;
  network_.unicast(master_, msg.src,
                   MigrationInstruction{master_, msg.src, msg.task_id, target->node});
}

void Middleware::begin_migration(NodeId provider, TaskId task_id, NodeId target) {
  NodeState& st = node(provider);
  if (!st.alive || !st.executing || st.executing->spec.task_id != task_id) return;
  if (target == kNoNode || target == provider) return;
  auto it = tasks_.find(task_id);
  if (it == tasks_.end()) return;
  TaskRecord& rec = it->second;
  if (rec.spec.status != TaskStatus::Executing || rec.spec.assigned_node != provider) return;

  // Phase 1: freeze the task image at the source.
  auto frozen = close_segment(provider, executed_in_segment(st));
  if (!frozen) return;
  const TaskSpec image = *frozen;
  rec.spec.executed_instructions = image.executed_instructions;
  set_status(rec, TaskStatus::Migrating, provider);
  rec.last_progress_at = engine_.now();
  try_start(provider); // the CPU moves on to the next queued task

  // Phase 2: ship code, data, and progress to the target.
  const std::int64_t image_bits =
      image.code_bits + image.input_bits + cfg_.migration_state_bits;
  network_.transfer(
      provider, target, image_bits, "image",
      [this, provider, target, image](const net::TransferOutcome& out) {
        auto it = tasks_.find(image.task_id);
        if (it == tasks_.end()) return;
        TaskRecord& rec = it->second;
        if (rec.spec.status != TaskStatus::Migrating) return;
        NodeState& src = node(provider);
        src.memory_used_bytes =
            std::max<std::int64_t>(0, src.memory_used_bytes - image.total_bits() / 8);
        if (out.success && node_alive(target)) {
          // Phase 3: resume on the target at the carried instruction count.
          ++migrations_;
          ++rec.migrations;
          rec.spec.assigned_node = target;
          rec.last_progress_at = engine_.now();
          task_arrived(target, rec.spec, true);
        } else if (node_alive(provider)) {
          // Transfer failed: fall back to the source.
          rec.spec.assigned_node = provider;
          rec.last_progress_at = engine_.now();
          task_arrived(provider, rec.spec, true);
        }
      });
}

} // namespace madcloud::mw
