#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace madcloud::harness {

// One row of metrics.csv; everything a run reports.
struct MetricsRecord {
  std::string scenario;
  std::string scheme;
  std::string power_mode;
  std::uint64_t seed = 0;
  std::int64_t tasks_submitted = 0;
  std::int64_t tasks_completed = 0;
  std::int64_t tasks_failed = 0;
  double atct_s = 0.0;
  double tx_energy_j = 0.0;
  std::int64_t control_packets = 0;
  std::int64_t data_packets = 0;
  std::int64_t migrations = 0;
  std::int64_t reallocations = 0;
  double mean_ct_s = 0.0;
  double p50_ct_s = 0.0;
  double p95_ct_s = 0.0;
  std::string error;
};

std::string metrics_csv_header();
std::string to_csv_row(const MetricsRecord& r);

// Parses rows written by to_csv_row (header skipped automatically).
std::vector<MetricsRecord> parse_metrics_csv(const std::string& path);

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& rows);

// Deterministic float formatting shared by every writer.
std::string format_double(double v);

} // namespace madcloud::harness
