// Copyright 2026 The mcran Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// SimConfig as `key = value` text, one key per line, `#` comments. Keys are
// the SimConfig field names; any subset may be given, the rest keep their
// defaults.

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "mcran/cran_sim.hpp"
#include "mcran/instance_io.hpp"

namespace mcran {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ParseError(line, "expected a boolean, got '" + v + "'");
}

}  // namespace detail

inline SimConfig read_sim_config(std::istream& in, SimConfig config = {}) {
  using Setter = std::function<void(const std::string&, std::size_t)>;
  auto size_field = [](std::size_t& f) -> Setter {
    return [&f](const std::string& v, std::size_t line) {
      const auto x = detail::parse_number<std::int64_t>(v, line);
      if (x < 1) throw ParseError(line, "value must be >= 1");
      f = static_cast<std::size_t>(x);
    };
  };
  auto real_field = [](double& f) -> Setter {
    return [&f](const std::string& v, std::size_t line) {
      f = detail::parse_number<double>(v, line);
    };
  };
  const std::map<std::string, Setter> setters{
      {"num_clouds", size_field(config.num_clouds)},
      {"bs_per_cloud", size_field(config.bs_per_cloud)},
      {"num_users", size_field(config.num_users)},
      {"intercell_distance", real_field(config.intercell_distance)},
      {"tx_power_per_cloud", real_field(config.tx_power_per_cloud)},
      {"noise_power", real_field(config.noise_power)},
      {"pathloss_intercept_db", real_field(config.pathloss_intercept_db)},
      {"pathloss_slope_db", real_field(config.pathloss_slope_db)},
      {"min_distance", real_field(config.min_distance)},
      {"shadowing_std_db", real_field(config.shadowing_std_db)},
      {"shadowing",
       [&](const std::string& v, std::size_t line) {
         config.shadowing = detail::parse_bool(v, line);
       }},
      {"rng_seed",
       [&](const std::string& v, std::size_t line) {
         config.rng_seed = detail::parse_number<std::uint64_t>(v, line);
       }},
  };

  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    raw = detail::trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const auto key = detail::trim(raw.substr(0, eq));
    const auto value = detail::trim(raw.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ParseError(line, "unknown key '" + key + "'");
    if (value.empty()) throw ParseError(line, "missing value for '" + key + "'");
    it->second(value, line);
  }
  config.validate();
  return config;
}

inline SimConfig read_sim_config_file(const std::string& path, SimConfig defaults = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  return read_sim_config(in, defaults);
}

inline void write_sim_config(std::ostream& out, const SimConfig& c) {
  using detail::format_real;
  out << "num_clouds = " << c.num_clouds << '\n'
      << "bs_per_cloud = " << c.bs_per_cloud << '\n'
      << "num_users = " << c.num_users << '\n'
      << "intercell_distance = " << format_real(c.intercell_distance) << '\n'
      << "tx_power_per_cloud = " << format_real(c.tx_power_per_cloud) << '\n'
      << "noise_power = " << format_real(c.noise_power) << '\n'
      << "pathloss_intercept_db = " << format_real(c.pathloss_intercept_db) << '\n'
      << "pathloss_slope_db = " << format_real(c.pathloss_slope_db) << '\n'
      << "min_distance = " << format_real(c.min_distance) << '\n'
      << "shadowing = " << (c.shadowing ? "true" : "false") << '\n'
      << "shadowing_std_db = " << format_real(c.shadowing_std_db) << '\n'
      << "rng_seed = " << c.rng_seed << '\n';
}

/// FNV-1a over the canonical key=value rendering.
inline std::uint64_t config_hash(const SimConfig& config) {
  std::ostringstream text;
  write_sim_config(text, config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = kDigits[x & 0xF];
  return s;
}

/// Reward matrix as CSV: header `cloud,u0,u1,...`, one row per cloud.
inline void write_rewards_csv(std::ostream& out, const GapInstance& instance) {
  out << "cloud";
  for (UserIndex u = 0; u < instance.num_users(); ++u) out << ",u" << u;
  out << '\n';
  for (CloudIndex c = 0; c < instance.num_clouds(); ++c) {
    out << c;
    for (UserIndex u = 0; u < instance.num_users(); ++u)
      out << ',' << detail::format_real(instance.reward(c, u));
    out << '\n';
  }
}

}  // namespace mcran
