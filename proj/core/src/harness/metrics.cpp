#include "madcloud/harness/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace madcloud::harness {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string metrics_csv_header() {
  return "scenario,scheme,power_mode,seed,tasks_submitted,tasks_completed,tasks_failed,"
         "atct_s,tx_energy_j,control_packets,data_packets,migrations,reallocations,"
         "mean_ct_s,p50_ct_s,p95_ct_s,error";
}

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

} // namespace

std::string to_csv_row(const MetricsRecord& r) {
  std::ostringstream out;
  out << sanitize(r.scenario) << ',' << sanitize(r.scheme) << ',' << sanitize(r.power_mode) << ','
      << r.seed << ',' << r.tasks_submitted << ',' << r.tasks_completed << ',' << r.tasks_failed
      << ',' << format_double(r.atct_s) << ',' << format_double(r.tx_energy_j) << ','
      << r.control_packets << ',' << r.data_packets << ',' << r.migrations << ','
      << r.reallocations << ',' << format_double(r.mean_ct_s) << ',' << format_double(r.p50_ct_s)
      << ',' << format_double(r.p95_ct_s) << ',' << sanitize(r.error);
  return out.str();
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << metrics_csv_header() << '\n';
  for (const auto& r : rows) out << to_csv_row(r) << '\n';
}

std::vector<MetricsRecord> parse_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics csv: " + path);
  std::vector<MetricsRecord> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("scenario,", 0) == 0) continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 17) fields.emplace_back();
    MetricsRecord r;
    r.scenario = fields[0];
    r.scheme = fields[1];
    r.power_mode = fields[2];
    r.seed = std::stoull(fields[3]);
    r.tasks_submitted = std::stoll(fields[4]);
    r.tasks_completed = std::stoll(fields[5]);
    r.tasks_failed = std::stoll(fields[6]);
    r.atct_s = std::stod(fields[7]);
    r.tx_energy_j = std::stod(fields[8]);
    r.control_packets = std::stoll(fields[9]);
    r.data_packets = std::stoll(fields[10]);
    r.migrations = std::stoll(fields[11]);
    r.reallocations = std::stoll(fields[12]);
    r.mean_ct_s = std::stod(fields[13]);
    r.p50_ct_s = std::stod(fields[14]);
    r.p95_ct_s = std::stod(fields[15]);
    r.error = fields[16];
    rows.push_back(r);
  }
  return rows;
}

} // namespace madcloud::harness
