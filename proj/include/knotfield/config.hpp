#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "common.hpp"

namespace knotfield {

// Flat human-readable configuration: "[section]" headers and "key = value"
// lines, values being scalars, strings, or comma lists. Keys are addressed as
// "section.key". Parsing and serialization preserve order, so a config
// round-trips losslessly.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
      std::string t = trim(line.substr(0, line.find('#')));
      if (t.empty()) continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw Error(errc::usage, "config line without '=': " + line);
      std::string key = trim(t.substr(0, eq));
      std::string val = trim(t.substr(eq + 1));
      std::string full = section.empty() ? key : section + "." + key;
      if (c.values_.count(full)) throw Error(errc::usage, "duplicate config key " + full);
      c.order_.push_back(full);
      c.values_[full] = val;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(errc::usage, "cannot read config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  std::string serialize() const {
    std::string out, cur_section;
    for (const auto& full : order_) {
      auto dotpos = full.find('.');
      std::string section = dotpos == std::string::npos ? "" : full.substr(0, dotpos);
      std::string key = dotpos == std::string::npos ? full : full.substr(dotpos + 1);
      if (section != cur_section) {
        out += "[" + section + "]\n";
        cur_section = section;
      }
      out += key + " = " + values_.at(full) + "\n";
    }
    return out;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error(errc::usage, "missing config key " + key);
    return it->second;
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const { return to_double(get_string(key), key); }
  double get_double(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }
  long long get_int(const std::string& key) const {
    return std::llround(get_double(key));
  }
  long long get_int(const std::string& key, long long dflt) const {
    return has(key) ? get_int(key) : dflt;
  }
  bool get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    std::string v = get_string(key);
    return v == "true" || v == "1" || v == "yes";
  }

  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    std::string v = get_string(key);
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::string t = trim(item);
      if (!t.empty()) out.push_back(to_double(t, key));
    }
    return out;
  }
  std::vector<double> get_list(const std::string& key, std::vector<double> dflt) const {
    return has(key) ? get_list(key) : dflt;
  }

  void set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
  }

  bool operator==(const Config& o) const { return values_ == o.values_ && order_ == o.order_; }

 private:
  static std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }
  static double to_double(const std::string& s, const std::string& key) {
    try {
      size_t pos;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(errc::usage, "config key " + key + ": not a number: " + s);
    }
  }

  std::vector<std::string> order_;
  std::map<std::string, std::string> values_;
};

}  // namespace knotfield
