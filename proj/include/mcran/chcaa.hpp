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

#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "mcran/instance.hpp"

namespace mcran {

/// Deletion state of the reward matrix during the greedy pass.
struct GreedyWorkset {
  struct Entry {
    CloudIndex cloud;
    UserIndex user;
    double reward;
  };

  std::vector<Entry> live;  // sorted: reward desc, then cloud asc, then user asc
  std::vector<std::int64_t> remaining_capacity;
  std::vector<bool> user_taken;

  explicit GreedyWorkset(const GapInstance& instance)
      : remaining_capacity(instance.capacities()), user_taken(instance.num_users(), false) {
    for (CloudIndex c = 0; c < instance.num_clouds(); ++c)
      for (UserIndex u = 0; u < instance.num_users(); ++u)
        if (instance.reward(c, u) > 0.0) live.push_back({c, u, instance.reward(c, u)});
    std::sort(live.begin(), live.end(), [](const Entry& a, const Entry& b) {
      return std::tie(b.reward, a.cloud, a.user) < std::tie(a.reward, b.cloud, b.user);
    });
  }
};

struct GreedyResult {
  Assignment assignment;
  double value = 0.0;
};

/// Largest remaining reward first. A user that fits its best cloud is assigned
/// and its column deleted; one that does not fit loses only that entry and
/// stays eligible elsewhere. Zero rewards are never assigned.
inline GreedyResult solve_chcaa(const GapInstance& instance) {
  GreedyWorkset work(instance);
  GreedyResult out{Assignment::unassigned(instance.num_users()), 0.0};
  // Walking the sorted entries and skipping deleted columns is the same as
  // repeatedly taking the maximum of the shrinking matrix.
  for (const auto& e : work.live) {
    if (work.user_taken[e.user]) continue;
    const std::int64_t w = instance.weight(e.cloud, e.user);
    if (w > work.remaining_capacity[e.cloud]) continue;
    work.remaining_capacity[e.cloud] -= w;
    work.user_taken[e.user] = true;
    out.assignment.user_to_cloud[e.user] = e.cloud;
  }
  out.value = evaluate(instance, out.assignment).value;
  return out;
}

}  // namespace mcran
