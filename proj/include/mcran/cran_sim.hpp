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

// Downlink multicloud RAN environment: hexagonal cells with one cloud per
// cell, B single-antenna base stations per cloud, single-antenna users,
// distance pathloss with Rayleigh fading, and sum-rate rewards
// r[c][u] = log2(1 + SINR[c][u]) under fixed all-ones beamformers.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mcran/chcaa.hpp"
#include "mcran/common.hpp"
#include "mcran/instance.hpp"
#include "mcran/seed.hpp"

namespace mcran {

struct SimConfig {
  std::size_t num_clouds = 7;
  std::size_t bs_per_cloud = 3;
  std::size_t num_users = 28;
  double intercell_distance = 500.0;  // meters
  double tx_power_per_cloud = 1.0;    // watts, split evenly over the cloud's BSs
  double noise_power = 1e-13;         // watts (-100 dBm)
  double pathloss_intercept_db = 128.1;
  double pathloss_slope_db = 37.6;    // per decade of km
  double min_distance = 10.0;         // meters
  bool shadowing = false;
  double shadowing_std_db = 8.0;
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (num_clouds < 1 || bs_per_cloud < 1 || num_users < 1)
      throw InvalidInput("num_clouds, bs_per_cloud and num_users must be >= 1");
    for (double x : {intercell_distance, tx_power_per_cloud, noise_power, min_distance,
                     pathloss_intercept_db, pathloss_slope_db}) {
      if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidInput("physical parameters must be finite and strictly positive");
    }
    if (shadowing && !(shadowing_std_db > 0.0))
      throw InvalidInput("shadowing_std_db must be positive when shadowing is on");
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct NetworkLayout {
  std::vector<Point> cloud_positions;
  Matrix<Point> bs_positions;  // C x B
  std::vector<Point> user_positions;

  friend bool operator==(const NetworkLayout&, const NetworkLayout&) = default;
};

namespace detail {

/// Cell centers on a hexagonal grid: origin first, then ring 1 (the six
/// neighbors at `spacing`), ring 2, and so on.
inline std::vector<Point> hex_centers(std::size_t count, double spacing) {
  // Axial lattice basis; neighbor k sits at angle 60k degrees.
  constexpr std::array<std::array<int, 2>, 6> kDirs{
      {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};
  auto to_point = [spacing](int q, int r) {
    return Point{spacing * (q + 0.5 * r), spacing * (std::numbers::sqrt3 / 2.0) * r};
  };
  std::vector<Point> out{Point{}};
  for (int ring = 1; out.size() < count; ++ring) {
    int q = kDirs[4][0] * ring;
    int r = kDirs[4][1] * ring;
    for (int side = 0; side < 6 && out.size() < count; ++side) {
      for (int step = 0; step < ring && out.size() < count; ++step) {
        out.push_back(to_point(q, r));
        q += kDirs[side][0];
        r += kDirs[side][1];
      }
    }
  }
  out.resize(count);
  return out;
}

/// Inside the hexagonal cell of a center whose neighbors are `spacing` away.
inline bool in_hex_cell(Point p, Point center, double spacing) {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  const double apothem = spacing / 2.0;
  for (int k = 0; k < 3; ++k) {
    const double a = k * std::numbers::pi / 3.0;
    if (std::abs(dx * std::cos(a) + dy * std::sin(a)) > apothem) return false;
  }
  return true;
}

}  // namespace detail

/// Deterministic cell and BS geometry plus users dropped uniformly over the
/// union of the cells (every cell has the same area, so pick a cell, then
/// rejection-sample inside it).
inline NetworkLayout generate_layout(const SimConfig& config) {
  config.validate();
  const double d = config.intercell_distance;
  NetworkLayout layout;
  layout.cloud_positions = detail::hex_centers(config.num_clouds, d);

  layout.bs_positions = Matrix<Point>(config.num_clouds, config.bs_per_cloud);
  const double radius = d / 3.0;
  for (std::size_t c = 0; c < config.num_clouds; ++c) {
    for (std::size_t b = 0; b < config.bs_per_cloud; ++b) {
      const double angle = std::numbers::pi / 2.0 +
                           2.0 * std::numbers::pi * static_cast<double>(b) /
                               static_cast<double>(config.bs_per_cloud);
      const Point center = layout.cloud_positions[c];
      layout.bs_positions(c, b) = {center.x + radius * std::cos(angle),
                                   center.y + radius * std::sin(angle)};
    }
  }

  std::mt19937_64 rng(child_seed(config.rng_seed, 0));
  std::uniform_int_distribution<std::size_t> pick_cell(0, config.num_clouds - 1);
  const double circumradius = d / std::numbers::sqrt3;
  std::uniform_real_distribution<double> box(-circumradius, circumradius);
  layout.user_positions.reserve(config.num_users);
  for (std::size_t u = 0; u < config.num_users; ++u) {
    const Point center = layout.cloud_positions[pick_cell(rng)];
    Point p;
    do {
      p = {center.x + box(rng), center.y + box(rng)};
    } while (!detail::in_hex_cell(p, center, d));
    layout.user_positions.push_back(p);
  }
  return layout;
}

/// Complex gains h[c][b][u] and the large-scale power gains behind them.
struct ChannelRealization {
  std::size_t num_clouds = 0;
  std::size_t bs_per_cloud = 0;
  std::size_t num_users = 0;
  std::vector<std::complex<double>> gains;
  std::vector<double> large_scale;  // linear pathloss (and shadowing) per link

  ChannelRealization() = default;
  ChannelRealization(std::size_t clouds, std::size_t bss, std::size_t users)
      : num_clouds(clouds),
        bs_per_cloud(bss),
        num_users(users),
        gains(clouds * bss * users),
        large_scale(clouds * bss * users, 1.0) {}

  std::size_t index(CloudIndex c, std::size_t b, UserIndex u) const {
    return (c * bs_per_cloud + b) * num_users + u;
  }
  std::complex<double>& gain(CloudIndex c, std::size_t b, UserIndex u) {
    return gains[index(c, b, u)];
  }
  const std::complex<double>& gain(CloudIndex c, std::size_t b, UserIndex u) const {
    return gains[index(c, b, u)];
  }

  /// h_cu, the cloud-to-user channel vector over the cloud's BSs.
  std::vector<std::complex<double>> cloud_vector(CloudIndex c, UserIndex u) const {
    std::vector<std::complex<double>> h(bs_per_cloud);
    for (std::size_t b = 0; b < bs_per_cloud; ++b) h[b] = gain(c, b, u);
    return h;
  }

  friend bool operator==(const ChannelRealization&, const ChannelRealization&) = default;
};

/// Pathloss in dB (negative) at a distance in meters.
inline double pathloss_db(double meters, const SimConfig& config) {
  return -(config.pathloss_intercept_db +
           config.pathloss_slope_db * std::log10(meters / 1000.0));
}

inline ChannelRealization sample_channels(const NetworkLayout& layout,
                                          const SimConfig& config) {
  config.validate();
  const std::size_t C = layout.cloud_positions.size();
  const std::size_t B = layout.bs_positions.cols();
  const std::size_t U = layout.user_positions.size();
  ChannelRealization ch(C, B, U);

  std::mt19937_64 rng(child_seed(config.rng_seed, 1));
  std::normal_distribution<double> component(0.0, std::sqrt(0.5));
  std::normal_distribution<double> shadow_db(0.0, config.shadowing_std_db);
  for (CloudIndex c = 0; c < C; ++c) {
    for (std::size_t b = 0; b < B; ++b) {
      for (UserIndex u = 0; u < U; ++u) {
        const double d = std::max(distance(layout.bs_positions(c, b), layout.user_positions[u]),
                                  config.min_distance);
        double db = pathloss_db(d, config);
        if (config.shadowing) db += shadow_db(rng);
        const double power = std::pow(10.0, db / 10.0);
        const double re = component(rng);
        const double im = component(rng);
        const std::size_t i = ch.index(c, b, u);
        ch.large_scale[i] = power;
        ch.gains[i] = std::sqrt(power) * std::complex<double>(re, im);
      }
    }
  }
  return ch;
}

/// Beamformer of cloud c: sqrt(P_c / B) on every BS.
inline std::vector<std::complex<double>> fixed_beamformer(const SimConfig& config,
                                                          std::size_t bs_per_cloud) {
  const double amp = std::sqrt(config.tx_power_per_cloud / static_cast<double>(bs_per_cloud));
  return std::vector<std::complex<double>>(bs_per_cloud, {amp, 0.0});
}

/// |h_cu^H w_c|^2 for every cloud and user.
inline Matrix<double> received_power(const ChannelRealization& ch, const SimConfig& config) {
  const auto w = fixed_beamformer(config, ch.bs_per_cloud);
  Matrix<double> power(ch.num_clouds, ch.num_users);
  for (CloudIndex c = 0; c < ch.num_clouds; ++c) {
    for (UserIndex u = 0; u < ch.num_users; ++u) {
      std::complex<double> inner{};
      for (std::size_t b = 0; b < ch.bs_per_cloud; ++b)
        inner += std::conj(ch.gain(c, b, u)) * w[b];
      power(c, u) = std::norm(inner);
    }
  }
  return power;
}

/// log2(1 + SINR) where every transmitter other than row c interferes at its
/// fixed power.
inline Matrix<double> sinr_rewards(const Matrix<double>& power, double noise_power) {
  Matrix<double> rewards(power.rows(), power.cols());
  for (UserIndex u = 0; u < power.cols(); ++u) {
    for (std::size_t c = 0; c < power.rows(); ++c) {
      double interference = 0.0;
      for (std::size_t other = 0; other < power.rows(); ++other)
        if (other != c) interference += power(other, u);
      const double sinr = power(c, u) / (noise_power + interference);
      rewards(c, u) = std::log2(1.0 + sinr);
    }
  }
  return rewards;
}

/// Sum-rate instance: alpha = 1, K_c = B. Depends only on the channels and
/// the config, never on any association.
inline GapInstance compute_rewards(const ChannelRealization& ch, const SimConfig& config) {
  return GapInstance::unit_weight(sinr_rewards(received_power(ch, config), config.noise_power),
                                  static_cast<std::int64_t>(ch.bs_per_cloud));
}

struct BaselineResult {
  GapInstance instance;  // C*B single-BS cells, capacity 1 each
  Assignment assignment;
  double value = 0.0;
};

/// Cloud-less comparison: each BS is its own cell with power P_c / B and
/// serves at most one user; all other BSs interfere. Solved greedily.
inline BaselineResult baseline_bs_association(const ChannelRealization& ch,
                                              const SimConfig& config) {
  const std::size_t cells = ch.num_clouds * ch.bs_per_cloud;
  const double per_bs = config.tx_power_per_cloud / static_cast<double>(ch.bs_per_cloud);
  Matrix<double> power(cells, ch.num_users);
  for (CloudIndex c = 0; c < ch.num_clouds; ++c)
    for (std::size_t b = 0; b < ch.bs_per_cloud; ++b)
      for (UserIndex u = 0; u < ch.num_users; ++u)
        power(c * ch.bs_per_cloud + b, u) = per_bs * std::norm(ch.gain(c, b, u));
  auto instance = GapInstance::unit_weight(sinr_rewards(power, config.noise_power), 1);
  auto greedy = solve_chcaa(instance);
  return {std::move(instance), std::move(greedy.assignment), greedy.value};
}

}  // namespace mcran
