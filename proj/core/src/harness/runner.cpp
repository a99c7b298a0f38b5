#include "madcloud/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "madcloud/baselines/baselines.hpp"
#include "madcloud/net/network.hpp"
#include "madcloud/radio/mobility.hpp"
#include "madcloud/sim/engine.hpp"
#include "madcloud/sim/rng.hpp"

namespace madcloud::harness {

namespace {

struct GeneratedTask {
  mw::TaskSpec spec;
  NodeId consumer;
  double submit_at;
};

std::vector<GeneratedTask> generate_workload(const ScenarioConfig& cfg, sim::RngStream& rng) {
  std::vector<GeneratedTask> tasks;
  tasks.reserve(static_cast<std::size_t>(cfg.workload.tasks));
  for (int i = 0; i < cfg.workload.tasks; ++i) {
    GeneratedTask t;
    t.spec.task_id = i;
    t.spec.instructions =
        rng.uniform_int(cfg.workload.instructions_lo, cfg.workload.instructions_hi);
    t.spec.input_bits = rng.uniform_int(cfg.workload.input_bits_lo, cfg.workload.input_bits_hi);
    t.spec.output_bits =
        static_cast<std::int64_t>(std::llround(cfg.workload.output_fraction *
                                               static_cast<double>(t.spec.input_bits)));
    t.spec.code_bits = cfg.workload.code_bits;
    t.submit_at = rng.uniform(cfg.workload.submit_start_s, cfg.workload.submit_end_s);
    t.consumer = cfg.scns[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(cfg.scns.size()) - 1))];
    tasks.push_back(t);
  }
  std::stable_sort(tasks.begin(), tasks.end(), [](const GeneratedTask& a, const GeneratedTask& b) {
    return a.submit_at < b.submit_at;
  });
  return tasks;
}

MetricsRecord assemble_metrics(const ScenarioConfig& cfg, const net::Network& network,
                               const mw::Middleware& middleware,
                               const std::map<TaskId, mw::Middleware::TaskRecord>& tasks) {
  MetricsRecord m;
  m.scenario = cfg.name;
  m.scheme = mw::to_string(cfg.scheme);
  m.power_mode = to_string(cfg.power_mode);
  m.seed = cfg.seed;
  m.tasks_submitted = static_cast<std::int64_t>(tasks.size());
  std::vector<double> completion_times;
  for (const auto& [id, rec] : tasks) {
    if (rec.spec.status == TaskStatus::Completed) {
      ++m.tasks_completed;
      const double ct = rec.completed_at - rec.submitted_at;
      m.atct_s += ct;
      completion_times.push_back(ct);
    } else if (rec.spec.status == TaskStatus::Failed) {
      ++m.tasks_failed;
    }
  }
  m.tx_energy_j = network.tx_energy_j();
  m.control_packets = network.control_packets();
  m.data_packets = network.data_packets();
  m.migrations = middleware.migrations();
  m.reallocations = middleware.reallocations();
  if (!completion_times.empty()) {
    std::sort(completion_times.begin(), completion_times.end());
    double sum = 0.0;
    for (double v : completion_times) sum += v;
    m.mean_ct_s = sum / static_cast<double>(completion_times.size());
    auto nearest_rank = [&](double p) {
      const auto n = completion_times.size();
      const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
      return completion_times[std::min(n - 1, std::max<std::size_t>(1, rank) - 1)];
    };
    m.p50_ct_s = nearest_rank(0.50);
    m.p95_ct_s = nearest_rank(0.95);
  }
  return m;
}

} // namespace

RunArtifacts run_scenario_artifacts(const ScenarioConfig& cfg, const RunOptions& opts) {
  cfg.validate();

  RunArtifacts artifacts;
  sim::Trace& trace = artifacts.trace;
  trace.record_positions = opts.record_positions;

  sim::Engine engine;
  sim::RngStream mobility_rng(cfg.seed, "mobility");
  sim::RngStream loss_rng(cfg.seed, "packet-loss");
  sim::RngStream workload_rng(cfg.seed, "workload");

  std::vector<radio::MobilityGroup> groups;
  for (const auto& g : cfg.groups) {
    groups.push_back(radio::MobilityGroup{g.members, g.speed_mps, g.jitter_m, g.region});
  }
  radio::MobilityModel mobility(std::move(groups), cfg.area_m, cfg.nodes, mobility_rng);

  net::Network::Params net_params;
  net_params.node_count = cfg.nodes;
  net_params.radio = cfg.radio;
  net_params.cfg = cfg.net;
  net_params.use_routing = cfg.scheme == mw::Scheme::Proposed;
  net_params.multi_power =
      cfg.scheme == mw::Scheme::Proposed && cfg.power_mode == PowerMode::Multi;
  net::Network network(engine, mobility, loss_rng, trace, net_params);

  mw::Middleware middleware(engine, network, trace, cfg.node_specs(), cfg.scheme, cfg.mw, cfg.smn);

  // Record the initial placement and bring the initial links up.
  for (NodeId n = 0; n < cfg.nodes; ++n) {
    trace.position({0.0, n, mobility.position(n).x, mobility.position(n).y});
  }
  network.on_mobility_step();

  // Mobility steps drive link state for the whole run.
  auto mobility_tick = [&](auto&& self) -> void {
    mobility.advance(cfg.mobility_step_s, mobility_rng);
    for (NodeId n = 0; n < cfg.nodes; ++n) {
      trace.position({engine.now(), n, mobility.position(n).x, mobility.position(n).y});
    }
    network.on_mobility_step();
    engine.schedule(engine.now() + cfg.mobility_step_s, sim::EventKind::MobilityStep,
                    [&self]() { self(self); });
  };
  engine.schedule(cfg.mobility_step_s, sim::EventKind::MobilityStep,
                  [&mobility_tick]() { mobility_tick(mobility_tick); });

  network.start();
  middleware.start();

  for (const auto& task : generate_workload(cfg, workload_rng)) {
    engine.schedule(task.submit_at, sim::EventKind::Timer,
                    [&middleware, task]() { middleware.submit(task.consumer, task.spec); });
  }

  engine.run_until(cfg.sim_time_s);

  artifacts.tasks = middleware.tasks();
  artifacts.result.metrics = assemble_metrics(cfg, network, middleware, artifacts.tasks);
  artifacts.result.validation =
      validate_run(trace, artifacts.tasks, artifacts.result.metrics, cfg.area_m);
  if (!opts.trace_path.empty()) trace.write_text(opts.trace_path);
  return artifacts;
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  return run_scenario_artifacts(cfg, opts).result;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_run(const sim::Trace& trace,
                              const std::map<TaskId, mw::Middleware::TaskRecord>& tasks,
                              const MetricsRecord& metrics, double area_m) {
  ValidationReport report;
  auto violation = [&](const std::string& v) { report.violations.push_back(v); };

  // Status machine: transitions must stay inside the allowed set.
  static const std::set<std::pair<TaskStatus, TaskStatus>> allowed = {
      {TaskStatus::Queued, TaskStatus::Dispatched},
      {TaskStatus::Dispatched, TaskStatus::Executing},
      {TaskStatus::Dispatched, TaskStatus::Queued},
      {TaskStatus::Dispatched, TaskStatus::Failed},
      {TaskStatus::Executing, TaskStatus::Completed},
      {TaskStatus::Executing, TaskStatus::Failed},
      {TaskStatus::Executing, TaskStatus::Migrating},
      {TaskStatus::Migrating, TaskStatus::Executing},
      {TaskStatus::Migrating, TaskStatus::Failed},
      {TaskStatus::Failed, TaskStatus::Queued},
  };
  std::map<TaskId, TaskStatus> current;
  std::map<TaskId, int> restarts;
  for (const auto& rec : trace.tasks()) {
    auto it = current.find(rec.task);
    const TaskStatus from = it == current.end() ? TaskStatus::Queued : it->second;
    if (rec.from != from) {
      std::ostringstream os;
      os << "task " << rec.task << ": transition claims from=" << to_string(rec.from)
         << " but state was " << to_string(from) << " at t=" << rec.t;
      violation(os.str());
    }
    if (!allowed.contains({rec.from, rec.to})) {
      std::ostringstream os;
      os << "task " << rec.task << ": illegal transition " << to_string(rec.from) << "->"
         << to_string(rec.to) << " at t=" << rec.t;
      violation(os.str());
    }
    if (rec.from == TaskStatus::Failed && rec.to == TaskStatus::Queued) ++restarts[rec.task];
    current[rec.task] = rec.to;
  }

  // Task conservation at the horizon.
  std::int64_t completed = 0;
  std::int64_t failed = 0;
  std::int64_t in_system = 0;
  for (const auto& [id, rec] : tasks) {
    switch (rec.spec.status) {
      case TaskStatus::Completed: ++completed; break;
      case TaskStatus::Failed: ++failed; break;
      default: ++in_system; break;
    }
  }
  if (completed + failed + in_system != static_cast<std::int64_t>(tasks.size())) {
    violation("task conservation broken: completed + failed + in-system != submitted");
  }
  if (metrics.tasks_completed != completed || metrics.tasks_failed != failed) {
    violation("metrics task counters disagree with final task records");
  }

  // Migration work conservation: for completed tasks that migrated and never
  // restarted, executed instruction segments must sum exactly.
  std::map<TaskId, std::int64_t> executed;
  for (const auto& e : trace.execs()) executed[e.task] += e.instructions;
  for (const auto& [id, rec] : tasks) {
    if (rec.spec.status != TaskStatus::Completed) continue;
    if (restarts.contains(id)) continue;
    auto it = executed.find(id);
    const std::int64_t total = it == executed.end() ? 0 : it->second;
    if (total != rec.spec.instructions) {
      std::ostringstream os;
      os << "work conservation broken for task " << id << ": executed " << total << " of "
         << rec.spec.instructions << " instructions (migrations=" << rec.migrations << ")";
      violation(os.str());
    }
  }

  // Positions stay inside the area.
  for (const auto& p : trace.positions()) {
    if (p.x < 0.0 || p.x > area_m || p.y < 0.0 || p.y > area_m) {
      std::ostringstream os;
      os << "node " << p.node << " left the area at t=" << p.t;
      violation(os.str());
      break;
    }
  }

  // Metric/trace agreement.
  double energy = 0.0;
  for (const auto& p : trace.packets()) energy += p.energy_j;
  if (std::abs(energy - metrics.tx_energy_j) > 1e-9 * std::max(1.0, std::abs(energy))) {
    violation("tx energy disagrees between trace and metrics");
  }
  double atct = 0.0;
  for (const auto& [id, rec] : tasks) {
    if (rec.spec.status == TaskStatus::Completed) atct += rec.completed_at - rec.submitted_at;
  }
  if (std::abs(atct - metrics.atct_s) > 1e-9 * std::max(1.0, std::abs(atct))) {
    violation("accumulated completion time disagrees between records and metrics");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<RunResult> sweep(const SweepSpec& spec, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  struct Job {
    ScenarioConfig cfg;
    std::string trace_path;
  };
  std::vector<Job> jobs;
  for (int tasks : spec.task_counts) {
    for (const auto scheme : spec.schemes) {
      for (const auto seed : spec.seeds) {
        Job job;
        job.cfg = spec.base;
        job.cfg.workload.tasks = tasks;
        job.cfg.scheme = scheme;
        job.cfg.power_mode = spec.power_mode;
        job.cfg.seed = seed;
        if (spec.write_traces) {
          std::ostringstream name;
          name << job.cfg.name << "_" << mw::to_string(scheme) << "_t" << tasks << "_s" << seed
               << ".log";
          job.trace_path = (fs::path(out_dir) / "traces" / name.str()).string();
        }
        jobs.push_back(std::move(job));
      }
    }
  }
  if (spec.write_traces) fs::create_directories(fs::path(out_dir) / "traces");

  std::vector<RunResult> results(jobs.size());
  const int workers = std::max(1, spec.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      RunOptions opts;
      opts.trace_path = jobs[i].trace_path;
      try {
        results[i] = run_scenario(jobs[i].cfg, opts);
      } catch (const std::exception& e) {
        RunResult r;
        r.metrics.scenario = jobs[i].cfg.name;
        r.metrics.scheme = mw::to_string(jobs[i].cfg.scheme);
        r.metrics.power_mode = to_string(jobs[i].cfg.power_mode);
        r.metrics.seed = jobs[i].cfg.seed;
        r.metrics.error = e.what();
        results[i] = std::move(r);
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<MetricsRecord> rows;
  rows.reserve(results.size());
  for (auto& r : results) {
    if (r.metrics.error.empty() && !r.validation.ok()) {
      r.metrics.error = "validation: " + r.validation.violations.front();
    }
    rows.push_back(r.metrics);
  }
  write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), rows);
  write_summary_csv((fs::path(out_dir) / "summary.csv").string(), rows);
  return results;
}

void write_summary_csv(const std::string& path, const std::vector<MetricsRecord>& rows) {
  struct Key {
    std::string scenario;
    std::int64_t tasks;
    std::string scheme;
    std::string power_mode;
    bool operator<(const Key& o) const {
      return std::tie(scenario, tasks, scheme, power_mode) <
             std::tie(o.scenario, o.tasks, o.scheme, o.power_mode);
    }
  };
  std::map<Key, std::vector<const MetricsRecord*>> by_key;
  std::map<std::pair<std::string, std::uint64_t>, const MetricsRecord*> proposed_by_run;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    by_key[Key{r.scenario, r.tasks_submitted, r.scheme, r.power_mode}].push_back(&r);
    if (r.scheme == "proposed") {
      proposed_by_run[{r.scenario + "/" + std::to_string(r.tasks_submitted), r.seed}] = &r;
    }
  }
  auto mean_sd = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.empty() ? 1.0 : static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    if (v.size() > 1) var /= static_cast<double>(v.size() - 1);
    return std::make_pair(mean, std::sqrt(var));
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "scenario,tasks,scheme,power_mode,n,atct_mean,atct_sd,tx_energy_mean,tx_energy_sd,"
         "control_packets_mean,data_packets_mean,completed_mean,"
         "improvement_atct_vs_proposed,improvement_energy_vs_proposed\n";
  for (const auto& [key, group] : by_key) {
    std::vector<double> atct, energy, control, data, completed, imp_atct, imp_energy;
    for (const auto* r : group) {
      atct.push_back(r->atct_s);
      energy.push_back(r->tx_energy_j);
      control.push_back(static_cast<double>(r->control_packets));
      data.push_back(static_cast<double>(r->data_packets));
      completed.push_back(static_cast<double>(r->tasks_completed));
      if (key.scheme != "proposed") {
        auto it = proposed_by_run.find(
            {key.scenario + "/" + std::to_string(key.tasks), r->seed});
        if (it != proposed_by_run.end() && r->atct_s > 0.0 && r->tx_energy_j > 0.0) {
          imp_atct.push_back((r->atct_s - it->second->atct_s) / r->atct_s);
          imp_energy.push_back((r->tx_energy_j - it->second->tx_energy_j) / r->tx_energy_j);
        }
      }
    }
    const auto [atct_m, atct_sd] = mean_sd(atct);
    const auto [en_m, en_sd] = mean_sd(energy);
    const auto [ctrl_m, ctrl_sd] = mean_sd(control);
    const auto [data_m, data_sd] = mean_sd(data);
    const auto [done_m, done_sd] = mean_sd(completed);
    (void)ctrl_sd;
    (void)data_sd;
    (void)done_sd;
    const auto [ia_m, ia_sd] = mean_sd(imp_atct);
    const auto [ie_m, ie_sd] = mean_sd(imp_energy);
    (void)ia_sd;
    (void)ie_sd;
    out << key.scenario << ',' << key.tasks << ',' << key.scheme << ',' << key.power_mode << ','
        << group.size() << ',' << format_double(atct_m) << ',' << format_double(atct_sd) << ','
        << format_double(en_m) << ',' << format_double(en_sd) << ',' << format_double(ctrl_m)
        << ',' << format_double(data_m) << ',' << format_double(done_m) << ','
        << format_double(imp_atct.empty() ? 0.0 : ia_m) << ','
        << format_double(imp_energy.empty() ? 0.0 : ie_m) << '\n';
  }
}

} // namespace madcloud::harness
