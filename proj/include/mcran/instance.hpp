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

// User-to-cloud association as a generalized assignment problem:
//
//   maximize    sum_{c,u} r[c][u] * A[c][u]
//   subject to  sum_c A[c][u] <= 1                 for every user u
//               sum_u alpha[c][u] * A[c][u] <= K[c] for every cloud c
//
// Clouds and users are 0-based everywhere in the library.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcran/common.hpp"

namespace mcran {

using CloudIndex = std::size_t;
using UserIndex = std::size_t;

class GapInstance {
 public:
  GapInstance(Matrix<double> rewards, Matrix<std::int64_t> weights,
              std::vector<std::int64_t> capacities)
      : rewards_(std::move(rewards)),
        weights_(std::move(weights)),
        capacities_(std::move(capacities)) {
    const std::size_t c = rewards_.rows();
    const std::size_t u = rewards_.cols();
    if (c == 0 || u == 0) throw InvalidInput("instance needs C >= 1 and U >= 1");
    if (weights_.rows() != c || weights_.cols() != u)
      throw InvalidInput("weight matrix must be C x U");
    if (capacities_.size() != c)
      throw InvalidInput("capacity vector must have length C");
    for (double r : rewards_.data()) {
      if (!std::isfinite(r) || r < 0.0)
        throw InvalidInput("rewards must be finite and non-negative");
    }
    for (std::int64_t w : weights_.data()) {
      if (w < 1) throw InvalidInput("weights must be positive integers");
    }
    for (std::int64_t k : capacities_) {
      if (k < 1) throw InvalidInput("capacities must be positive integers");
    }
  }

  /// Every weight 1, every capacity `capacity`.
  static GapInstance unit_weight(Matrix<double> rewards, std::int64_t capacity) {
    const std::size_t c = rewards.rows();
    const std::size_t u = rewards.cols();
    return GapInstance(std::move(rewards), Matrix<std::int64_t>(c, u, 1),
                       std::vector<std::int64_t>(c, capacity));
  }

  std::size_t num_clouds() const noexcept { return rewards_.rows(); }
  std::size_t num_users() const noexcept { return rewards_.cols(); }

  double reward(CloudIndex c, UserIndex u) const { return rewards_(c, u); }
  std::int64_t weight(CloudIndex c, UserIndex u) const { return weights_(c, u); }
  std::int64_t capacity(CloudIndex c) const { return capacities_[c]; }

  const Matrix<double>& rewards() const noexcept { return rewards_; }
  const Matrix<std::int64_t>& weights() const noexcept { return weights_; }
  const std::vector<std::int64_t>& capacities() const noexcept {
    return capacities_;
  }

  friend bool operator==(const GapInstance&, const GapInstance&) = default;

 private:
  Matrix<double> rewards_;
  Matrix<std::int64_t> weights_;
  std::vector<std::int64_t> capacities_;
};

/// One slot per user, so a user can never sit in two clouds.
struct Assignment {
  std::vector<std::optional<CloudIndex>> user_to_cloud;

  static Assignment unassigned(std::size_t num_users) {
    return Assignment{std::vector<std::optional<CloudIndex>>(num_users)};
  }

  std::size_t size() const noexcept { return user_to_cloud.size(); }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct ObjectiveReport {
  double value = 0.0;
  bool feasible = true;
  std::vector<std::int64_t> per_cloud_load;
};

/// Objective value and per-cloud load. Rewards are summed in user order, which
/// every solver in the library follows so values compare bit-exactly.
inline ObjectiveReport evaluate(const GapInstance& instance,
                                const Assignment& assignment) {
  if (assignment.size() != instance.num_users())
    throw InvalidInput("assignment length " + std::to_string(assignment.size()) +
                       " does not match U=" +
                       std::to_string(instance.num_users()));
  ObjectiveReport report;
  report.per_cloud_load.assign(instance.num_clouds(), 0);
  for (UserIndex u = 0; u < assignment.size(); ++u) {
    const auto& slot = assignment.user_to_cloud[u];
    if (!slot) continue;
    if (*slot >= instance.num_clouds())
      throw InvalidInput("assignment names cloud " + std::to_string(*slot) +
                         " outside [0, C)");
    report.value += instance.reward(*slot, u);
    report.per_cloud_load[*slot] += instance.weight(*slot, u);
  }
  for (CloudIndex c = 0; c < instance.num_clouds(); ++c) {
    if (report.per_cloud_load[c] > instance.capacity(c)) report.feasible = false;
  }
  return report;
}

struct OracleResult {
  Assignment assignment;
  double value = 0.0;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Exhaustive search over all (C+1)^U assignments. Among equal-valued optima
/// the lexicographically smallest user_to_cloud vector wins, with
/// "unassigned" ordered before every cloud.
inline OracleResult brute_force_optimum(
    const GapInstance& instance,
    std::uint64_t enumeration_cap = kDefaultEnumerationCap) {
  const std::size_t num_clouds = instance.num_clouds();
  const std::size_t num_users = instance.num_users();

  std::uint64_t space = 1;
  for (std::size_t u = 0; u < num_users; ++u) {
    if (space > enumeration_cap / (num_clouds + 1))
      throw InstanceTooLarge("(C+1)^U exceeds the enumeration cap");
    space *= num_clouds + 1;
  }
  if (space > enumeration_cap)
    throw InstanceTooLarge("(C+1)^U exceeds the enumeration cap");

  std::vector<std::optional<CloudIndex>> current(num_users);
  std::vector<std::int64_t> remaining = instance.capacities();
  OracleResult best{Assignment::unassigned(num_users), 0.0};
  bool have_best = false;

  // Depth-first in lexicographic order; only a strictly better leaf replaces
  // the incumbent, so the first optimum found is the lexicographic minimum.
  auto search = [&](auto&& self, UserIndex u, double partial) -> void {
    if (u == num_users) {
      if (!have_best || partial > best.value) {
        best.assignment.user_to_cloud = current;
        best.value = partial;
        have_best = true;
      }
      return;
    }
    current[u].reset();
    self(self, u + 1, partial + 0.0);
    for (CloudIndex c = 0; c < num_clouds; ++c) {
      const std::int64_t w = instance.weight(c, u);
      if (w > remaining[c]) continue;
      remaining[c] -= w;
      current[u] = c;
      self(self, u + 1, partial + instance.reward(c, u));
      remaining[c] += w;
    }
    current[u].reset();
  };
  search(search, 0, 0.0);
  return best;
}

}  // namespace mcran
