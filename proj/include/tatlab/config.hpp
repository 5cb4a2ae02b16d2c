#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tatlab/errors.hpp"

namespace tat {

/// Flat INI configuration: [section] key = value. Keys are addressed as
/// "section.key" throughout, which is also how errors name them.
class Config {
 public:
  using Section = std::map<std::string, std::string>;

  static Config parse(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("", "malformed config: " + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
    }
    Config cfg;
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty())
        throw ConfigError(section, "key '" + section + "' outside of any section");
      for (const auto& [key, value] : body) cfg.sections_[section][key] = value.data();
    }
    return cfg;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
    return parse(in);
  }

  bool has(const std::string& dotted) const { return raw(dotted).has_value(); }

  std::optional<std::string> raw(const std::string& dotted) const {
    const auto [sec, key] = split(dotted);
    const auto s = sections_.find(sec);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  }

  void set(const std::string& dotted, std::string value) {
    const auto [sec, key] = split(dotted);
    sections_[sec][key] = std::move(value);
  }

  /// Applies "section.key=value" overrides.
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || assignment.find('.') > eq)
      throw ConfigError(assignment, "override must look like section.key=value: " + assignment);
    set(assignment.substr(0, eq), assignment.substr(eq + 1));
  }

  std::string get_string(const std::string& dotted) const {
    auto v = raw(dotted);
    if (!v) throw ConfigError(dotted, "missing required key " + dotted);
    return *v;
  }
  std::string get_string(const std::string& dotted, const std::string& fallback) const {
    auto v = raw(dotted);
    if (!v) note_default(dotted, fallback);
    return v.value_or(fallback);
  }

  double get_double(const std::string& dotted) const {
    return to_double(dotted, get_string(dotted));
  }
  double get_double(const std::string& dotted, double fallback) const {
    auto v = raw(dotted);
    if (!v) note_default(dotted, format_number(fallback));
    return v ? to_double(dotted, *v) : fallback;
  }

  long long get_int(const std::string& dotted) const { return to_int(dotted, get_string(dotted)); }
  long long get_int(const std::string& dotted, long long fallback) const {
    auto v = raw(dotted);
    if (!v) note_default(dotted, std::to_string(fallback));
    return v ? to_int(dotted, *v) : fallback;
  }

  bool get_bool(const std::string& dotted, bool fallback) const {
    auto v = raw(dotted);
    if (!v) {
      note_default(dotted, fallback ? "true" : "false");
      return fallback;
    }
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError(dotted, "expected a boolean for " + dotted + ", got '" + *v + "'");
  }

  /// Comma-separated list of reals.
  std::vector<double> get_list(const std::string& dotted, std::vector<double> fallback) const {
    auto v = raw(dotted);
    if (!v) {
      std::string text;
      for (std::size_t i = 0; i < fallback.size(); ++i) text += (i ? "," : "") + format_number(fallback[i]);
      note_default(dotted, text);
      return fallback;
    }
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(dotted, item));
    return out;
  }

  /// Rejects sections or keys not listed in `schema` (section -> allowed keys).
  void reject_unknown(const std::map<std::string, std::set<std::string>>& schema) const {
    for (const auto& [sec, body] : sections_) {
      const auto s = schema.find(sec);
      if (s == schema.end()) throw ConfigError(sec, "unknown config section [" + sec + "]");
      for (const auto& [key, value] : body)
        if (!s->second.count(key))
          throw ConfigError(sec + "." + key, "unknown config key " + sec + "." + key);
    }
  }

  /// Canonical INI text; section and key order are sorted so output is stable.
  std::string to_ini() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [sec, body] : sections_) {
      if (!first) out << '\n';
      first = false;
      out << '[' << sec << "]\n";
      for (const auto& [key, value] : body) out << key << " = " << value << '\n';
    }
    return out.str();
  }

  const std::map<std::string, Section>& sections() const { return sections_; }

  /// to_ini() of the explicit entries plus every default consulted so far.
  std::string resolved_ini() const {
    Config all = *this;
    for (const auto& [key, value] : defaults_)
      if (!all.has(key)) all.set(key, value);
    return all.to_ini();
  }

 private:
  static std::pair<std::string, std::string> split(const std::string& dotted) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos) return {dotted, ""};
    return {dotted.substr(0, dot), dotted.substr(dot + 1)};
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
      throw ConfigError(key, "expected a number for " + key + ", got '" + text + "'");
    return v;
  }

  static long long to_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
      throw ConfigError(key, "expected an integer for " + key + ", got '" + text + "'");
    return v;
  }

  static std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  void note_default(const std::string& dotted, std::string value) const { defaults_[dotted] = std::move(value); }

  std::map<std::string, Section> sections_;
  mutable std::map<std::string, std::string> defaults_;
};

}  // namespace tat
