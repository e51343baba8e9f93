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

// Round-robin auction for user-to-cloud association.
//
// Iteration t (1-based) belongs to cloud (t-1) mod C. The active cloud
//   1. resets to zero the price of every user it claimed on its previous
//      turn whose price still equals its bid (only once t > C),
//   2. solves a knapsack over net benefits r[c][u] - price[u],
//   3. bids r[c][u] on every selected user, which becomes that user's price.
//
// The run stops after C consecutive "quiet" iterations: the active cloud
// reselects the set it held before and the price vector leaves the
// iteration exactly as it entered (a reset followed by a re-bid is quiet).
// After such a window the state at the start of the next iteration equals
// the state one round earlier, so the auction is at a fixed point.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mcran/instance.hpp"
#include "mcran/instance_io.hpp"
#include "mcran/knapsack.hpp"

namespace mcran {

/// Cloud active at 1-based iteration t, as a 0-based index.
constexpr CloudIndex active_cloud(std::uint64_t t, std::size_t num_clouds) {
  return static_cast<CloudIndex>((t - 1) % num_clouds);
}

/// A cloud's most recent bidding event. Only the latest one is kept; the
/// reset test never looks further back than one round.
struct CloudBids {
  std::vector<UserIndex> users;  // ascending
  std::vector<double> bids;      // parallel to users, bids[i] == r[c][users[i]]
  std::uint64_t stamp = 0;       // iteration of the event, 0 before the first

  friend bool operator==(const CloudBids&, const CloudBids&) = default;
};

/// What happened during one iteration.
struct StepRecord {
  std::uint64_t t = 0;
  CloudIndex cloud = 0;
  std::vector<UserIndex> resets;
  std::vector<UserIndex> selected;
  std::vector<double> solve_prices;  // prices after resets, used for net benefit
  std::vector<double> prices;        // prices when the iteration ends
  bool quiet = false;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct AuctionOptions {
  KnapsackMethod method = KnapsackMethod::kExact;
  std::uint64_t max_rounds = 100;
  std::uint64_t dp_cell_cap = kDefaultDpCellCap;
};

/// One cloud's turn, expressed over the data that cloud owns plus the shared
/// price vector. Both the centralized state machine and the distributed
/// agents call this.
inline StepRecord bid_locally(std::uint64_t t, CloudIndex cloud, std::size_t num_clouds,
                              std::span<const double> reward_row,
                              std::span<const std::int64_t> weight_row,
                              std::int64_t capacity, CloudBids& record,
                              std::vector<double>& prices, const AuctionOptions& options) {
  StepRecord rec;
  rec.t = t;
  rec.cloud = cloud;
  const std::vector<double> entry_prices = prices;

  if (t > num_clouds) {
    for (std::size_t i = 0; i < record.users.size(); ++i) {
      const UserIndex u = record.users[i];
      if (prices[u] == record.bids[i]) {
        prices[u] = 0.0;
        rec.resets.push_back(u);
      }
    }
  }
  rec.solve_prices = prices;

  KnapsackProblem problem;
  problem.profits.resize(prices.size());
  for (UserIndex u = 0; u < prices.size(); ++u) problem.profits[u] = reward_row[u] - prices[u];
  problem.weights.assign(weight_row.begin(), weight_row.end());
  problem.capacity = capacity;
  const auto solution = solve(problem, options.method, options.dp_cell_cap);

  CloudBids next;
  next.stamp = t;
  next.users = solution.selected;
  for (UserIndex u : next.users) {
    next.bids.push_back(reward_row[u]);
    prices[u] = reward_row[u];
  }
  rec.quiet = next.users == record.users && prices == entry_prices;
  record = std::move(next);
  rec.selected = record.users;
  rec.prices = prices;
  return rec;
}

/// Grants each user to the most recently active cloud that bid on it and
/// whose bid still equals the user's price.
inline Assignment extract_assignment(std::span<const CloudBids> records,
                                     std::span<const double> prices) {
  Assignment out = Assignment::unassigned(prices.size());
  std::vector<std::uint64_t> winning_stamp(prices.size(), 0);
  for (CloudIndex c = 0; c < records.size(); ++c) {
    const auto& rec = records[c];
    for (std::size_t i = 0; i < rec.users.size(); ++i) {
      const UserIndex u = rec.users[i];
      if (prices[u] == rec.bids[i] && rec.stamp > winning_stamp[u]) {
        out.user_to_cloud[u] = c;
        winning_stamp[u] = rec.stamp;
      }
    }
  }
  return out;
}

/// Number of clouds whose latest bid on u still equals u's price.
inline std::size_t holder_count(std::span<const CloudBids> records,
                                std::span<const double> prices, UserIndex u) {
  std::size_t n = 0;
  for (const auto& rec : records)
    for (std::size_t i = 0; i < rec.users.size(); ++i)
      if (rec.users[i] == u && prices[u] == rec.bids[i]) ++n;
  return n;
}

class AuctionState {
 public:
  AuctionState(const GapInstance& instance, AuctionOptions options = {})
      : instance_(&instance),
        options_(options),
        prices_(instance.num_users(), 0.0),
        records_(instance.num_clouds()) {}

  /// Runs iteration t() and advances t.
  StepRecord step() {
    const std::size_t C = instance_->num_clouds();
    const CloudIndex c = active_cloud(t_, C);
    const auto rewards = instance_->rewards().row(c);
    const auto weights = instance_->weights().row(c);
    auto rec = bid_locally(t_, c, C, rewards, weights, instance_->capacity(c), records_[c],
                           prices_, options_);
    quiet_streak_ = rec.quiet ? quiet_streak_ + 1 : 0;
    ++t_;
    return rec;
  }

  bool converged() const noexcept { return quiet_streak_ >= instance_->num_clouds(); }

  std::uint64_t t() const noexcept { return t_; }
  std::uint64_t iterations() const noexcept { return t_ - 1; }
  std::uint64_t quiet_streak() const noexcept { return quiet_streak_; }
  const std::vector<double>& prices() const noexcept { return prices_; }
  const std::vector<CloudBids>& records() const noexcept { return records_; }
  const GapInstance& instance() const noexcept { return *instance_; }
  const AuctionOptions& options() const noexcept { return options_; }

  Assignment assignment() const { return extract_assignment(records_, prices_); }

 private:
  const GapInstance* instance_;
  AuctionOptions options_;
  std::uint64_t t_ = 1;
  std::uint64_t quiet_streak_ = 0;
  std::vector<double> prices_;
  std::vector<CloudBids> records_;
};

struct AuctionResult {
  Assignment assignment;
  double value = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
  double gamma = 1.0;

  friend bool operator==(const AuctionResult&, const AuctionResult&) = default;
};

struct TracedAuction {
  AuctionResult result;
  std::vector<StepRecord> trace;
};

namespace detail {

inline AuctionResult finish(const AuctionState& state) {
  AuctionResult result;
  result.assignment = state.assignment();
  result.value = evaluate(state.instance(), result.assignment).value;
  result.iterations = state.iterations();
  result.converged = state.converged();
  result.gamma = approximation_ratio(state.options().method);
  return result;
}

}  // namespace detail

inline TracedAuction run_traced(const GapInstance& instance, AuctionOptions options = {}) {
  if (options.max_rounds < 1) throw InvalidInput("max_rounds must be >= 1");
  AuctionState state(instance, options);
  TracedAuction out;
  const std::uint64_t cap = options.max_rounds * instance.num_clouds();
  while (!state.converged() && state.iterations() < cap) out.trace.push_back(state.step());
  out.result = detail::finish(state);
  return out;
}

inline AuctionResult run(const GapInstance& instance, AuctionOptions options = {}) {
  if (options.max_rounds < 1) throw InvalidInput("max_rounds must be >= 1");
  AuctionState state(instance, options);
  const std::uint64_t cap = options.max_rounds * instance.num_clouds();
  while (!state.converged() && state.iterations() < cap) state.step();
  return detail::finish(state);
}

inline AuctionResult run(const GapInstance& instance, KnapsackMethod method,
                         std::uint64_t max_rounds = 100) {
  AuctionOptions options;
  options.method = method;
  options.max_rounds = max_rounds;
  return run(instance, options);
}

/// oracle / auction value; 0/0 counts as 1 and x/0 as +inf.
inline double certificate(const AuctionResult& result, double oracle_value) {
  if (result.value == 0.0)
    return oracle_value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return oracle_value / result.value;
}

/// Writes one line per iteration:
///   t=<t> cloud=<c> resets=<u,...> set=<u,...> prices=<p,...>
/// Indices are 0-based, "-" marks an empty list, prices use shortest
/// round-trip decimal form.
inline void write_trace(std::ostream& out, std::span<const StepRecord> trace) {
  auto list = [&](const std::vector<UserIndex>& xs) {
    if (xs.empty()) {
      out << '-';
      return;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  };
  for (const auto& rec : trace) {
    out << "t=" << rec.t << " cloud=" << rec.cloud << " resets=";
    list(rec.resets);
    out << " set=";
    list(rec.selected);
    out << " prices=";
    for (std::size_t i = 0; i < rec.prices.size(); ++i)
      out << (i ? "," : "") << detail::format_real(rec.prices[i]);
    out << '\n';
  }
}

}  // namespace mcran
