#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "madcloud/harness/config.hpp"
#include "madcloud/harness/metrics.hpp"
#include "madcloud/mw/middleware.hpp"
#include "madcloud/sim/trace.hpp"

namespace madcloud::harness {

// Liveness/safety audit of a finished run: task conservation, the status
// machine, migration work conservation, position bounds, and metric/trace
// agreement.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

struct RunOptions {
  std::string trace_path;       // empty: no text trace written
  bool record_positions = true; // needed by the bounds check and paired-trace tests
};

struct RunResult {
  MetricsRecord metrics;
  ValidationReport validation;
};

struct RunArtifacts {
  RunResult result;
  sim::Trace trace;
  std::map<TaskId, mw::Middleware::TaskRecord> tasks;
};

// Executes one full scenario and aggregates metrics at the horizon.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

// Same, but keeps the trace and final task records for tests.
RunArtifacts run_scenario_artifacts(const ScenarioConfig& cfg, const RunOptions& opts = {});

ValidationReport validate_run(const sim::Trace& trace,
                              const std::map<TaskId, mw::Middleware::TaskRecord>& tasks,
                              const MetricsRecord& metrics, double area_m);

struct SweepSpec {
  ScenarioConfig base;
  std::vector<int> task_counts;
  std::vector<std::uint64_t> seeds;
  std::vector<mw::Scheme> schemes;
  PowerMode power_mode = PowerMode::Multi;
  int jobs = 1; // parallel isolated runs; output order is always deterministic
  bool write_traces = false;
};

// Cartesian product of (task count, scheme, seed); each run is isolated and
// rows are merged in (tasks, scheme, seed) order regardless of completion
// order. Writes metrics.csv and summary.csv under out_dir. Run failures
// become rows with the error column set.
std::vector<RunResult> sweep(const SweepSpec& spec, const std::string& out_dir);

// Per-(tasks, scheme) aggregation with paired relative improvements against
// the proposed scheme.
void write_summary_csv(const std::string& path, const std::vector<MetricsRecord>& rows);

} // namespace madcloud::harness
