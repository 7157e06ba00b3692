#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace wlss {

// How a metric is judged:
//   within    |empirical − predicted| ≤ tolerance
//   at_most   empirical ≤ predicted
//   at_least  empirical ≥ predicted
//   info      pass iff the value is finite (reported, not asserted)
struct Metric {
  std::string name;
  double empirical = 0;
  double predicted = 0;
  double standard_error = 0;
  double tolerance = 0;
  std::string comparison = "within";
  bool pass = false;
  std::string provenance;  // module that produced the prediction
  std::string error;       // set when the metric could not be computed

  void judge();
};

Metric make_metric(const std::string& name, double empirical, double predicted, double se, double tolerance,
                   const std::string& comparison, const std::string& provenance);
Metric failed_metric(const std::string& name, const std::string& provenance, const std::string& error);

struct Report {
  std::string kind;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Metric> metrics;
  double wall_clock_seconds = 0;
  std::string version;

  bool all_pass() const;
  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);
};

enum class ReportFormat { kJson, kCsv };

void write_report(const Report& report, const std::string& path, ReportFormat format);
// Format chosen from the extension (.csv, else JSON).
void write_report(const Report& report, const std::string& path);

}  // namespace wlss
