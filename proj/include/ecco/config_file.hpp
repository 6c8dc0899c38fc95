#pragma once

// Flat key-value configuration: one `section.key = value` per line, `#`
// starts a comment. Every key can also be set from the command line; the
// CLI applies file entries first and flags afterwards.

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecco/benchmark.hpp"
#include "ecco/error.hpp"

namespace ecco {

using KeyValueList = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(v) + "' is not a number");
  }
  return out;
}

inline int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(v) + "' is not an integer");
  }
  return out;
}

inline bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + std::string(key) + "': '" + std::string(v) + "' is not a boolean");
}

} // namespace detail

/// Parses the text of a config file into ordered key-value pairs.
[[nodiscard]] inline KeyValueList parse_key_values(std::string_view text) {
  KeyValueList out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'section.key = value'");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty() || key.find('.') == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": key must have the form section.key");
    }
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

[[nodiscard]] inline KeyValueList read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

/// Sets one configuration key. Unknown keys are an error.
inline void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_int;
  if (key == "model.preset") {
    c.preset = quarter_car::parse_preset(value);
  } else if (key == "model.reticulation") {
    c.reticulation = quarter_car::parse_reticulation(value);
  } else if (key == "model.micro_ratio_s1") {
    c.micro_ratio_s1 = parse_int(key, value);
  } else if (key == "model.micro_ratio_s2") {
    c.micro_ratio_s2 = parse_int(key, value);
  } else if (key == "controller.type") {
    c.controller = parse_controller(value);
  } else if (key == "controller.r") {
    c.r = parse_double(key, value);
  } else if (key == "controller.E0") {
    c.E0 = parse_double(key, value);
  } else if (key == "controller.TOL") {
    c.TOL = parse_double(key, value);
  } else if (key == "controller.rho") {
    c.rho = parse_double(key, value);
  } else if (key == "controller.alpha_s") {
    c.bounds.alpha_s = parse_double(key, value);
  } else if (key == "controller.dt_min") {
    c.bounds.dt_min = parse_double(key, value);
  } else if (key == "controller.dt_max") {
    c.bounds.dt_max = parse_double(key, value);
  } else if (key == "controller.theta_min") {
    c.bounds.theta_min = parse_double(key, value);
  } else if (key == "controller.theta_max") {
    c.bounds.theta_max = parse_double(key, value);
  } else if (key == "sim.t_end") {
    c.t_end = parse_double(key, value);
  } else if (key == "sim.dt0") {
    c.dt0 = parse_double(key, value);
  } else if (key == "sim.parallel") {
    c.parallel = parse_bool(key, value);
  } else if (key == "reference.h_ref") {
    c.h_ref = parse_double(key, value);
  } else if (key == "scan.horizon") {
    c.scan_horizon = parse_double(key, value);
  } else if (key == "output.path") {
    c.output_path = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

inline void apply_settings(ExperimentConfig& c, const KeyValueList& kv) {
  for (const auto& [k, v] : kv) apply_setting(c, k, v);
}

} // namespace ecco
