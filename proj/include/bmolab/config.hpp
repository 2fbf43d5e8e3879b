#pragma once

// Flat key-value run configuration with [section] headers. Order is
// preserved so a config echoes byte-for-byte into report headers; every
// run is reproducible from its echoed config plus seed.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace bmolab {

struct RunConfig {
  // (section, key) -> value; insertion order kept for the echo.
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> entries;

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static RunConfig parse(std::istream& in) {
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw std::invalid_argument("config line " + std::to_string(lineno) + ": unterminated section");
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(t.substr(0, eq));
      const std::string val = trim(t.substr(eq + 1));
      if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
      cfg.entries.emplace_back(section, std::make_pair(key, val));
    }
    return cfg;
  }

  static RunConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    return parse(in);
  }

  static RunConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  bool has(const std::string& section, const std::string& key) const {
    for (const auto& [s, kv] : entries)
      if (s == section && kv.first == key) return true;
    return false;
  }

  std::string get(const std::string& section, const std::string& key, const std::string& fallback = "") const {
    for (const auto& [s, kv] : entries)
      if (s == section && kv.first == key) return kv.second;
    return fallback;
  }

  double get_num(const std::string& section, const std::string& key, double fallback) const {
    const std::string v = get(section, key);
    if (v.empty()) return fallback;
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)) != "") throw std::invalid_argument("config: non-numeric value for " + section + "." + key);
    return x;
  }

  long long get_int(const std::string& section, const std::string& key, long long fallback) const {
    const std::string v = get(section, key);
    if (v.empty()) return fallback;
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (trim(v.substr(pos)) != "") throw std::invalid_argument("config: non-integer value for " + section + "." + key);
    return x;
  }

  void set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& [s, kv] : entries)
      if (s == section && kv.first == key) {
        kv.second = value;
        return;
      }
    entries.emplace_back(section, std::make_pair(key, value));
  }

  /// Canonical text form (used both for files and for report echoes).
  std::string serialize() const {
    std::ostringstream out;
    std::string cur = ""; // never a real section name
    for (const auto& [s, kv] : entries) {
      if (s != cur) {
        if (cur != "") out << "\n";
        out << "[" << s << "]\n";
        cur = s;
      }
      out << kv.first << " = " << kv.second << "\n";
    }
    return out.str();
  }
};

} // namespace bmolab
