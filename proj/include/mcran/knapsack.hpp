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

// 0/1 knapsack subroutines for one cloud's bidding step. Items whose profit
// is not strictly positive are never selected by any routine here.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcran/common.hpp"

namespace mcran {

struct KnapsackProblem {
  std::vector<double> profits;
  std::vector<std::int64_t> weights;
  std::int64_t capacity = 1;
};

struct KnapsackSolution {
  std::vector<std::size_t> selected;  // ascending item indices
  double value = 0.0;

  friend bool operator==(const KnapsackSolution&, const KnapsackSolution&) = default;
};

enum class KnapsackMethod { kExact, kGreedy };

/// Worst-case ratio of the subroutine: optimum <= ratio * returned value.
constexpr double approximation_ratio(KnapsackMethod method) {
  return method == KnapsackMethod::kExact ? 1.0 : 2.0;
}

constexpr std::string_view to_string(KnapsackMethod method) {
  return method == KnapsackMethod::kExact ? "exact" : "greedy";
}

inline constexpr std::uint64_t kDefaultDpCellCap = 100'000'000;

namespace detail {

inline void validate(const KnapsackProblem& problem) {
  if (problem.profits.size() != problem.weights.size())
    throw InvalidInput("knapsack profits and weights differ in length");
  if (problem.capacity < 1) throw InvalidInput("knapsack capacity must be >= 1");
  for (auto w : problem.weights)
    if (w < 1) throw InvalidInput("knapsack weights must be >= 1");
}

inline KnapsackSolution make_solution(std::vector<std::size_t> selected,
                                      std::span<const double> profits) {
  std::sort(selected.begin(), selected.end());
  KnapsackSolution out{std::move(selected), 0.0};
  for (auto i : out.selected) out.value += profits[i];
  return out;
}

inline std::vector<std::size_t> positive_items(std::span<const double> profits) {
  std::vector<std::size_t> items;
  for (std::size_t i = 0; i < profits.size(); ++i)
    if (profits[i] > 0.0) items.push_back(i);
  return items;
}

}  // namespace detail

/// Exact capacity-indexed dynamic program. Among optimal subsets the
/// lexicographically smallest ascending index list is returned.
inline KnapsackSolution solve_exact(const KnapsackProblem& problem,
                                    std::uint64_t cell_cap = kDefaultDpCellCap) {
  detail::validate(problem);
  const std::size_t n = problem.profits.size();
  if (n != 0 && static_cast<std::uint64_t>(problem.capacity) > cell_cap / n)
    throw InstanceTooLarge("knapsack DP table exceeds the cell cap");

  const auto items = detail::positive_items(problem.profits);
  const std::size_t m = items.size();
  std::int64_t total_weight = 0;
  for (auto i : items) total_weight += std::min(problem.weights[i], problem.capacity);
  const auto width = static_cast<std::size_t>(std::min(problem.capacity, total_weight));

  // best[i][w]: optimum over the suffix items[i..m) with budget w.
  Matrix<double> best(m + 1, width + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    const double p = problem.profits[items[i]];
    const auto wi = static_cast<std::size_t>(problem.weights[items[i]]);
    for (std::size_t w = 0; w <= width; ++w) {
      double value = best(i + 1, w);
      if (wi <= w) value = std::max(value, p + best(i + 1, w - wi));
      best(i, w) = value;
    }
  }

  // Taking the lowest-index item whenever it stays optimal yields the
  // lexicographic minimum: every item here has positive profit, so an
  // optimal completion can never be empty when inclusion is optimal.
  std::vector<std::size_t> chosen;
  std::size_t w = width;
  for (std::size_t i = 0; i < m; ++i) {
    const auto wi = static_cast<std::size_t>(problem.weights[items[i]]);
    if (wi <= w && problem.profits[items[i]] + best(i + 1, w - wi) == best(i, w)) {
      chosen.push_back(items[i]);
      w -= wi;
    }
  }
  return detail::make_solution(std::move(chosen), problem.profits);
}

/// Greedy by profit density, then the better of that packing and the single
/// most profitable item that fits. At least half the optimum.
inline KnapsackSolution solve_greedy(const KnapsackProblem& problem) {
  detail::validate(problem);
  auto items = detail::positive_items(problem.profits);
  const auto& p = problem.profits;
  const auto& wt = problem.weights;
  std::stable_sort(items.begin(), items.end(), [&](std::size_t a, std::size_t b) {
    return p[a] * static_cast<double>(wt[b]) > p[b] * static_cast<double>(wt[a]);
  });

  std::vector<std::size_t> packed;
  std::int64_t room = problem.capacity;
  for (auto i : items) {
    if (wt[i] <= room) {
      packed.push_back(i);
      room -= wt[i];
    }
  }
  auto greedy = detail::make_solution(std::move(packed), p);

  std::optional<std::size_t> single;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && wt[i] <= problem.capacity && (!single || p[i] > p[*single]))
      single = i;
  }
  if (single && p[*single] > greedy.value)
    return detail::make_solution({*single}, p);
  return greedy;
}

/// Unit-weight fast path: the min(k, #positive) largest positive profits,
/// lower index first on ties.
inline KnapsackSolution select_top_k(std::span<const double> profits, std::size_t k) {
  auto items = detail::positive_items(profits);
  std::stable_sort(items.begin(), items.end(),
                   [&](std::size_t a, std::size_t b) { return profits[a] > profits[b]; });
  if (items.size() > k) items.resize(k);
  return detail::make_solution(std::move(items), profits);
}

inline KnapsackSolution solve(const KnapsackProblem& problem, KnapsackMethod method,
                              std::uint64_t cell_cap = kDefaultDpCellCap) {
  return method == KnapsackMethod::kExact ? solve_exact(problem, cell_cap)
                                          : solve_greedy(problem);
}

}  // namespace mcran
