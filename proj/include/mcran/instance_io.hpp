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

// Plain-text instance format, one logical row per line:
//
//   # comments run to end of line, blank lines are ignored
//   C U
//   <C lines of U rewards>
//   <C lines of U integer weights>
//   <1 line of C integer capacities>
//
// Reals are written in shortest round-trip decimal form, so
// read(write(x)) == x bit for bit.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mcran/common.hpp"
#include "mcran/instance.hpp"

namespace mcran {

namespace detail {

struct NumberedLine {
  std::size_t number;
  std::vector<std::string> tokens;
};

inline std::vector<NumberedLine> tokenize_lines(std::istream& in) {
  std::vector<NumberedLine> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream fields(raw);
    NumberedLine line{number, {}};
    for (std::string tok; fields >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(line, "cannot parse '" + std::string(tok) + "' as a number");
  return value;
}

inline std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

inline GapInstance read_instance(std::istream& in) {
  const auto lines = detail::tokenize_lines(in);
  if (lines.empty()) throw ParseError(1, "empty instance file: expected header 'C U'");

  const auto& header = lines.front();
  if (header.tokens.size() != 2)
    throw ParseError(header.number, "header must be exactly 'C U'");
  const auto num_clouds = detail::parse_number<std::int64_t>(header.tokens[0], header.number);
  const auto num_users = detail::parse_number<std::int64_t>(header.tokens[1], header.number);
  if (num_clouds < 1 || num_users < 1)
    throw ParseError(header.number, "header values C and U must be positive");

  const auto rows_needed = static_cast<std::size_t>(2 * num_clouds + 1);
  if (lines.size() - 1 < rows_needed) {
    const std::size_t last = lines.back().number;
    throw ParseError(last + 1, "expected " + std::to_string(rows_needed) +
                                   " data rows after the header, found " +
                                   std::to_string(lines.size() - 1));
  }
  if (lines.size() - 1 > rows_needed)
    throw ParseError(lines[rows_needed + 1].number, "trailing data after capacity row");

  const auto C = static_cast<std::size_t>(num_clouds);
  const auto U = static_cast<std::size_t>(num_users);
  auto expect_width = [](const detail::NumberedLine& line, std::size_t width,
                         const char* what) {
    if (line.tokens.size() != width)
      throw ParseError(line.number, std::string(what) + " row needs " +
                                        std::to_string(width) + " values, found " +
                                        std::to_string(line.tokens.size()));
  };

  Matrix<double> rewards(C, U);
  Matrix<std::int64_t> weights(C, U);
  std::vector<std::int64_t> capacities(C);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& line = lines[1 + c];
    expect_width(line, U, "reward");
    for (std::size_t u = 0; u < U; ++u) {
      rewards(c, u) = detail::parse_number<double>(line.tokens[u], line.number);
      if (!(rewards(c, u) >= 0.0) || !std::isfinite(rewards(c, u)))
        throw ParseError(line.number, "rewards must be finite and non-negative");
    }
  }
  for (std::size_t c = 0; c < C; ++c) {
    const auto& line = lines[1 + C + c];
    expect_width(line, U, "weight");
    for (std::size_t u = 0; u < U; ++u) {
      weights(c, u) = detail::parse_number<std::int64_t>(line.tokens[u], line.number);
      if (weights(c, u) < 1) throw ParseError(line.number, "weights must be >= 1");
    }
  }
  const auto& cap_line = lines[1 + 2 * C];
  expect_width(cap_line, C, "capacity");
  for (std::size_t c = 0; c < C; ++c) {
    capacities[c] = detail::parse_number<std::int64_t>(cap_line.tokens[c], cap_line.number);
    if (capacities[c] < 1) throw ParseError(cap_line.number, "capacities must be >= 1");
  }
  return GapInstance(std::move(rewards), std::move(weights), std::move(capacities));
}

inline GapInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file '" + path + "'");
  return read_instance(in);
}

inline void write_instance(std::ostream& out, const GapInstance& instance) {
  const std::size_t C = instance.num_clouds();
  const std::size_t U = instance.num_users();
  out << C << ' ' << U << '\n';
  out << "# rewards\n";
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t u = 0; u < U; ++u)
      out << (u ? " " : "") << detail::format_real(instance.reward(c, u));
    out << '\n';
  }
  out << "# weights\n";
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t u = 0; u < U; ++u) out << (u ? " " : "") << instance.weight(c, u);
    out << '\n';
  }
  out << "# capacities\n";
  for (std::size_t c = 0; c < C; ++c) out << (c ? " " : "") << instance.capacity(c);
  out << '\n';
}

inline std::string to_string(const GapInstance& instance) {
  std::ostringstream out;
  write_instance(out, instance);
  return out.str();
}

}  // namespace mcran
