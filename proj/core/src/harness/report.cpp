#include "madcloud/harness/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace madcloud::harness {

std::vector<std::string> report_metrics() {
  return {"atct", "tx_energy", "control_packets", "data_packets", "migrations", "reallocations"};
}

namespace {

double metric_value(const MetricsRecord& r, const std::string& metric) {
  if (metric == "atct") return r.atct_s;
  if (metric == "tx_energy") return r.tx_energy_j;
  if (metric == "control_packets") return static_cast<double>(r.control_packets);
  if (metric == "data_packets") return static_cast<double>(r.data_packets);
  if (metric == "migrations") return static_cast<double>(r.migrations);
  if (metric == "reallocations") return static_cast<double>(r.reallocations);
  std::string valid;
  for (const auto& m : report_metrics()) valid += (valid.empty() ? "" : "|") + m;
  throw std::invalid_argument("unknown metric '" + metric + "' (expected " + valid + ")");
}

} // namespace

std::string build_series_tsv(const std::vector<MetricsRecord>& rows, const std::string& metric) {
  struct Key {
    std::string series;
    std::int64_t x;
    bool operator<(const Key& o) const { return std::tie(series, x) < std::tie(o.series, o.x); }
  };
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    std::string series = r.scheme;
    if (r.scheme == "proposed" && r.power_mode == "max-only") series += "-max-only";
    groups[Key{series, r.tasks_submitted}].push_back(metric_value(r, metric));
  }
  std::ostringstream out;
  out << "# metric=" << metric << "\n";
  out << "x\tscheme\tmean\tstddev\tn\n";
  for (const auto& [key, values] : groups) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    if (values.size() > 1) var /= static_cast<double>(values.size() - 1);
    out << key.x << '\t' << key.series << '\t' << format_double(mean) << '\t'
        << format_double(std::sqrt(var)) << '\t' << values.size() << '\n';
  }
  return out.str();
}

std::string emit_plot_data(const std::string& in_dir, const std::string& metric) {
  namespace fs = std::filesystem;
  const auto rows = parse_metrics_csv((fs::path(in_dir) / "metrics.csv").string());
  const std::string text = build_series_tsv(rows, metric);
  const std::string out_path = (fs::path(in_dir) / ("series_" + metric + ".tsv")).string();
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  out << text;
  return out_path;
}

} // namespace madcloud::harness
