// Command-line front end: run one scenario, sweep a grid of runs, or turn a
// metrics.csv into plot-ready series.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "madcloud/harness/config.hpp"
#include "madcloud/harness/report.hpp"
#include "madcloud/harness/runner.hpp"

namespace {

namespace fs = std::filesystem;
using namespace madcloud;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  // "1..10" or "1,2,5"
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, range));
    const auto hi = std::stoull(text.substr(range + 2));
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    seeds.push_back(std::stoull(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return seeds;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stoi(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::vector<mw::Scheme> parse_scheme_list(const std::string& text) {
  if (text == "all") {
    return {mw::Scheme::Proposed, mw::Scheme::Hta, mw::Scheme::MinHop};
  }
  std::vector<mw::Scheme> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(harness::parse_scheme(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

harness::ScenarioConfig load_base_config(const std::string& config_path,
                                         const std::string& preset_name) {
  if (!config_path.empty()) return harness::load_config_file(config_path);
  if (!preset_name.empty()) {
    auto cfg = harness::preset(preset_name);
    cfg.validate();
    return cfg;
  }
  auto cfg = harness::default_config();
  cfg.validate();
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"madcloud: a mobile ad hoc cloud resource-management simulator"};
  app.require_subcommand(1);

  // run -----------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write metrics + trace");
  std::string run_config, run_preset, run_scheme, run_power = "multi", run_out = "out";
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  run_cmd->add_option("--config", run_config, "Scenario config JSON");
  run_cmd->add_option("--preset", run_preset, "Built-in scenario preset (s1|s2|s3|s4|default)");
  run_cmd->add_option("--scheme", run_scheme, "proposed|hta|minhop");
  run_cmd->add_option("--seed", run_seed, "Run seed")->each([&](const std::string&) {
    run_seed_set = true;
  });
  run_cmd->add_option("--power-mode", run_power, "multi|max-only");
  run_cmd->add_option("--out", run_out, "Output directory");

  // sweep ---------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a (tasks x schemes x seeds) grid");
  std::string sw_config, sw_preset, sw_tasks = "10,20,30,40", sw_seeds = "1..10",
              sw_schemes = "all", sw_power = "multi", sw_out = "out";
  int sw_jobs = 1;
  bool sw_traces = false;
  sweep_cmd->add_option("--config", sw_config, "Scenario config JSON");
  sweep_cmd->add_option("--preset", sw_preset, "Built-in scenario preset");
  sweep_cmd->add_option("--tasks", sw_tasks, "Comma-separated task counts");
  sweep_cmd->add_option("--seeds", sw_seeds, "Seed list: 1..10 or 1,2,3");
  sweep_cmd->add_option("--schemes", sw_schemes, "all or comma-separated scheme names");
  sweep_cmd->add_option("--power-mode", sw_power, "multi|max-only");
  sweep_cmd->add_option("--jobs", sw_jobs, "Parallel runs (output order is deterministic)");
  sweep_cmd->add_flag("--traces", sw_traces, "Write a trace file per run");
  sweep_cmd->add_option("--out", sw_out, "Output directory");

  // report --------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Aggregate metrics.csv into plot series");
  std::string rp_in = "out", rp_metric = "atct";
  report_cmd->add_option("--in", rp_in, "Directory containing metrics.csv");
  report_cmd->add_option("--metric", rp_metric, "atct|tx_energy|control_packets|...");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      harness::ScenarioConfig cfg;
      try {
        cfg = load_base_config(run_config, run_preset);
        if (!run_scheme.empty()) cfg.scheme = harness::parse_scheme(run_scheme);
        cfg.power_mode = harness::parse_power_mode(run_power);
        if (run_seed_set) cfg.seed = run_seed;
        cfg.validate();
      } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      }
      fs::create_directories(run_out);
      harness::RunOptions opts;
      opts.trace_path = (fs::path(run_out) / "trace.log").string();
      const auto result = harness::run_scenario(cfg, opts);
      harness::write_metrics_csv((fs::path(run_out) / "metrics.csv").string(), {result.metrics});
      std::cout << harness::metrics_csv_header() << "\n"
                << harness::to_csv_row(result.metrics) << "\n";
      if (!result.validation.ok()) {
        for (const auto& v : result.validation.violations) {
          std::cerr << "validation: " << v << "\n";
        }
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (*sweep_cmd) {
      harness::SweepSpec spec;
      try {
        spec.base = load_base_config(sw_config, sw_preset);
        spec.task_counts = parse_int_list(sw_tasks);
        spec.seeds = parse_seed_list(sw_seeds);
        spec.schemes = parse_scheme_list(sw_schemes);
        spec.power_mode = harness::parse_power_mode(sw_power);
        spec.jobs = sw_jobs;
        spec.write_traces = sw_traces;
        if (spec.task_counts.empty() || spec.seeds.empty() || spec.schemes.empty()) {
          throw harness::ConfigError("tasks, seeds, and schemes must be non-empty");
        }
      } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      }
      const auto results = harness::sweep(spec, sw_out);
      std::size_t failures = 0;
      for (const auto& r : results) {
        if (!r.metrics.error.empty()) ++failures;
      }
      std::cout << "sweep: " << results.size() << " runs, " << failures << " failed, results in "
                << sw_out << "\n";
      return kExitOk;
    }

    if (*report_cmd) {
      try {
        const auto path = harness::emit_plot_data(rp_in, rp_metric);
        std::cout << "wrote " << path << "\n";
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
