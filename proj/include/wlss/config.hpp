#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace wlss {

// Flat key = value configuration in TOML-style syntax:
//
//   kind = "clt"
//   n = 200
//   xi = [0.5, 1, 2]
//   [entry]            # later keys become "entry.<key>"
//   kind = "laplace"
//
// Values are numbers, booleans, quoted or bare strings, or flat arrays.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  // Parses `text` with the same value grammar as the file.
  void set(const std::string& key, const std::string& text);
  void set_json(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::string require_string(const std::string& key) const;

  std::vector<std::string> keys() const;
  const nlohmann::json& json() const { return values_; }

 private:
  nlohmann::json values_ = nlohmann::json::object();
};

nlohmann::json parse_config_value(const std::string& text);

}  // namespace wlss
