#include "wlss/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wlss/core.hpp"

namespace wlss {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quote) {
      if (ch == quote) quote = 0;
    } else if (ch == '"' || ch == '\'') {
      quote = ch;
    } else if (ch == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

nlohmann::json scalar(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw InvalidInput("config: empty value");
  if (s.front() == '"' || s.front() == '\'') {
    if (s.size() < 2 || s.back() != s.front()) throw InvalidInput("config: unterminated string: " + s);
    return s.substr(1, s.size() - 2);
  }
  if (s == "true") return true;
  if (s == "false") return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size() && errno == 0) {
    if (s.find_first_of(".eE") == std::string::npos && std::abs(v) < 9e15) return static_cast<long long>(v);
    return v;
  }
  return s;  // bare word
}

}  // namespace

nlohmann::json parse_config_value(const std::string& text) {
  const std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw InvalidInput("config: unterminated array: " + s);
    nlohmann::json arr = nlohmann::json::array();
    const std::string body = trim(s.substr(1, s.size() - 2));
    if (body.empty()) return arr;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;  // trailing comma
      arr.push_back(scalar(item));
    }
    return arr;
  }
  return scalar(s);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    const auto where = origin + ":" + std::to_string(lineno);
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') throw InvalidInput("config: bad section header at " + where);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InvalidInput("config: expected key = value at " + where);
    std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw InvalidInput("config: empty key at " + where);
    if (!section.empty()) key = section + "." + key;
    if (c.values_.contains(key)) throw InvalidInput("config: duplicate key '" + key + "' at " + where);
    try {
      c.values_[key] = parse_config_value(s.substr(eq + 1));
    } catch (const InvalidInput& e) {
      throw InvalidInput(std::string(e.what()) + " at " + where);
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& text) { values_[key] = parse_config_value(text); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string Config::require_string(const std::string& key) const {
  if (!has(key)) throw InvalidInput("config: missing required key '" + key + "'");
  return get_string(key, "");
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  if (!v.is_number()) throw InvalidInput("config: '" + key + "' must be a number");
  return v.get<double>();
}

long long Config::get_int(const std::string& key, long long fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
  throw InvalidInput("config: '" + key + "' must be an integer");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  if (!v.is_boolean()) throw InvalidInput("config: '" + key + "' must be true or false");
  return v.get<bool>();
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = values_.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw InvalidInput("config: '" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InvalidInput("config: '" + key + "' must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> k;
  for (auto it = values_.begin(); it != values_.end(); ++it) k.push_back(it.key());
  return k;
}

}  // namespace wlss
