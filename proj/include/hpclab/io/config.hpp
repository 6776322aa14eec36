#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpclab::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` file. Blank lines and `#` comments are ignored; list
/// values are comma separated. Every key must be consumed, so typos surface
/// through unused_keys().
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& is, const std::string& origin = "<config>") {
    Config c;
    c.origin_ = origin;
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
      ++number;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
      if (value.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": key '" + key + "' has no value");
      if (c.entries_.count(key)) {
        throw ConfigError(origin + ":" + std::to_string(number) + ": duplicate key '" + key + "' (first on line " +
                          std::to_string(c.entries_.at(key).line) + ")");
      }
      c.entries_[key] = {value, number};
    }
    return c;
  }

  static Config from_string(const std::string& text, const std::string& origin = "<string>") {
    std::istringstream is(text);
    return parse(is, origin);
  }

  static Config load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    return parse(is, path);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { entries_[key] = {value, 0}; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto* e = find(key);
    return e ? e->value : fallback;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto* e = find(key);
    return e ? to_double(key, *e, e->value) : fallback;
  }

  double require_double(const std::string& key) const {
    if (!has(key)) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return get_double(key, 0.0);
  }

  int get_int(const std::string& key, int fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(e->value, &used);
    } catch (const std::exception&) {
      fail(key, *e, "expected an integer");
    }
    if (used != e->value.size()) fail(key, *e, "expected an integer");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(key, *e, "expected true or false");
  }

  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, *e, trim(item)));
    return out;
  }

  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

  /// Throws listing every key that nothing read.
  void reject_unused() const {
    const auto u = unused_keys();
    if (u.empty()) return;
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& k : u) msg += " '" + k + "' (line " + std::to_string(entries_.at(k).line) + ")";
    throw ConfigError(msg);
  }

  std::map<std::string, std::string> values() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, e] : entries_) out[k] = e.value;
    return out;
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  [[noreturn]] void fail(const std::string& key, const Entry& e, const std::string& what) const {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": key '" + key + "': " + what + ", got '" + e.value +
                      "'");
  }

  double to_double(const std::string& key, const Entry& e, const std::string& text) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      fail(key, e, "expected a number");
    }
    if (used != text.size()) fail(key, e, "expected a number");
    return v;
  }

  std::string origin_ = "<config>";
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace hpclab::io
