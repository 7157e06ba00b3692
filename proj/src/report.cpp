#include "wlss/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wlss/core.hpp"

namespace wlss {

void Metric::judge() {
  if (!error.empty() || !std::isfinite(empirical)) {
    pass = false;
    return;
  }
  if (comparison == "within")
    pass = std::isfinite(predicted) && std::abs(empirical - predicted) <= tolerance;
  else if (comparison == "at_most")
    pass = empirical <= predicted;
  else if (comparison == "at_least")
    pass = empirical >= predicted;
  else if (comparison == "info")
    pass = true;
  else
    throw InvalidInput("metric '" + name + "': unknown comparison " + comparison);
}

Metric make_metric(const std::string& name, double empirical, double predicted, double se, double tolerance,
                   const std::string& comparison, const std::string& provenance) {
  Metric m;
  m.name = name;
  m.empirical = empirical;
  m.predicted = predicted;
  m.standard_error = se;
  m.tolerance = tolerance;
  m.comparison = comparison;
  m.provenance = provenance;
  m.judge();
  return m;
}

Metric failed_metric(const std::string& name, const std::string& provenance, const std::string& error) {
  Metric m;
  m.name = name;
  m.empirical = NAN;
  m.predicted = NAN;
  m.provenance = provenance;
  m.error = error.empty() ? "unknown error" : error;
  m.pass = false;
  return m;
}

bool Report::all_pass() const {
  for (const auto& m : metrics)
    if (!m.pass) return false;
  return true;
}

namespace {

// JSON has no NaN; non-finite numbers are stored as null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double from_num(const nlohmann::json& v) { return v.is_null() ? NAN : v.get<double>(); }

}  // namespace

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["config"] = config;
  j["version"] = version;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["all_pass"] = all_pass();
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : metrics) {
    nlohmann::json r;
    r["name"] = m.name;
    r["empirical"] = num(m.empirical);
    r["predicted"] = num(m.predicted);
    r["standard_error"] = num(m.standard_error);
    r["tolerance"] = num(m.tolerance);
    r["comparison"] = m.comparison;
    r["pass"] = m.pass;
    r["provenance"] = m.provenance;
    if (!m.error.empty()) r["error"] = m.error;
    j["metrics"].push_back(r);
  }
  return j;
}

Report Report::from_json(const nlohmann::json& j) {
  Report r;
  r.kind = j.at("kind").get<std::string>();
  r.config = j.at("config");
  r.version = j.at("version").get<std::string>();
  r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  for (const auto& m : j.at("metrics")) {
    Metric x;
    x.name = m.at("name").get<std::string>();
    x.empirical = from_num(m.at("empirical"));
    x.predicted = from_num(m.at("predicted"));
    x.standard_error = from_num(m.at("standard_error"));
    x.tolerance = from_num(m.at("tolerance"));
    x.comparison = m.at("comparison").get<std::string>();
    x.pass = m.at("pass").get<bool>();
    x.provenance = m.at("provenance").get<std::string>();
    if (m.contains("error")) x.error = m.at("error").get<std::string>();
    r.metrics.push_back(x);
  }
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void write_report(const Report& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report " + path);
  if (format == ReportFormat::kJson) {
    out << report.to_json().dump(2) << '\n';
  } else {
    out << "kind,name,empirical,predicted,standard_error,tolerance,comparison,pass,provenance,error\n";
    for (const auto& m : report.metrics)
      out << csv_field(report.kind) << ',' << csv_field(m.name) << ',' << csv_num(m.empirical) << ','
          << csv_num(m.predicted) << ',' << csv_num(m.standard_error) << ',' << csv_num(m.tolerance) << ','
          << m.comparison << ',' << (m.pass ? "true" : "false") << ',' << csv_field(m.provenance) << ','
          << csv_field(m.error) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_report(const Report& report, const std::string& path) {
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  write_report(report, path, csv ? ReportFormat::kCsv : ReportFormat::kJson);
}

}  // namespace wlss
