#pragma once

#include <string>
#include <vector>

#include "madcloud/harness/metrics.hpp"

namespace madcloud::harness {

// Metrics that can be turned into plot series.
std::vector<std::string> report_metrics();

// Groups csv rows into one series per (scheme, power mode): x is the task
// count, y the metric mean over seeds, with the sample standard deviation as
// the error bar. Returns the TSV text ("x scheme mean stddev n" columns).
std::string build_series_tsv(const std::vector<MetricsRecord>& rows, const std::string& metric);

// Reads metrics.csv under in_dir and writes series_<metric>.tsv next to it.
// Returns the output path.
std::string emit_plot_data(const std::string& in_dir, const std::string& metric);

} // namespace madcloud::harness
