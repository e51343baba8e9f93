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

// Monte-Carlo drivers behind the `fig1`, `fig2` and `oracle-check` commands.
// Realization i always uses child_seed(seed, i) whatever the thread count,
// and rows come back in realization order.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "mcran/chcaa.hpp"
#include "mcran/cran_sim.hpp"
#include "mcran/dcaa.hpp"
#include "mcran/seed.hpp"
#include "mcran/sim_io.hpp"

namespace mcran {

/// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any call is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

struct RealizationOutcome {
  SimConfig config;
  GapInstance instance;
  AuctionResult dcaa;
  double chcaa_rate = 0.0;
  double baseline_rate = 0.0;
};

inline RealizationOutcome run_realization(const SimConfig& config,
                                          KnapsackMethod method = KnapsackMethod::kExact) {
  const auto layout = generate_layout(config);
  const auto channels = sample_channels(layout, config);
  auto instance = compute_rewards(channels, config);
  auto dcaa = run(instance, method);
  const double chcaa = solve_chcaa(instance).value;
  const double baseline = baseline_bs_association(channels, config).value;
  return {config, std::move(instance), std::move(dcaa), chcaa, baseline};
}

struct Fig1Row {
  std::size_t realization = 0;
  double dcaa_rate = 0.0;
  double chcaa_rate = 0.0;
  double baseline_rate = 0.0;
  std::uint64_t dcaa_iterations = 0;
  bool dcaa_converged = false;
};

inline std::vector<Fig1Row> run_fig1(const SimConfig& base, std::size_t realizations,
                                     std::uint64_t seed, unsigned threads = 0) {
  if (realizations < 1) throw InvalidInput("realizations must be >= 1");
  std::vector<Fig1Row> rows(realizations);
  parallel_for(
      realizations,
      [&](std::size_t i) {
        SimConfig config = base;
        config.rng_seed = child_seed(seed, i);
        const auto out = run_realization(config);
        rows[i] = {i,  out.dcaa.value, out.chcaa_rate, out.baseline_rate, out.dcaa.iterations,
                   out.dcaa.converged};
      },
      threads);
  return rows;
}

struct Fig2Row {
  std::size_t num_users = 0;
  double mean_gain_percent = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;
  std::vector<std::uint64_t> dcaa_iterations;
  std::vector<bool> dcaa_converged;
  std::size_t unconverged = 0;
};

/// Mean of 100 * (dcaa - baseline) / baseline per user count. Realizations
/// with a zero baseline are dropped and counted.
inline std::vector<Fig2Row> run_fig2(const SimConfig& base,
                                     const std::vector<std::size_t>& user_counts,
                                     std::size_t realizations, std::uint64_t seed,
                                     unsigned threads = 0) {
  if (realizations < 1) throw InvalidInput("realizations must be >= 1");
  std::vector<Fig2Row> rows;
  for (std::size_t users : user_counts) {
    SimConfig sweep = base;
    sweep.num_users = users;
    std::vector<std::optional<RealizationOutcome>> slots(realizations);
    parallel_for(
        realizations,
        [&](std::size_t i) {
          SimConfig config = sweep;
          config.rng_seed = child_seed(seed, i);
          slots[i] = run_realization(config);
        },
        threads);
    Fig2Row row;
    row.num_users = users;
    double sum = 0.0;
    for (const auto& slot : slots) {
      row.dcaa_iterations.push_back(slot->dcaa.iterations);
      row.dcaa_converged.push_back(slot->dcaa.converged);
      if (!slot->dcaa.converged) ++row.unconverged;
      if (slot->baseline_rate == 0.0) {
        ++row.dropped;
        continue;
      }
      sum += 100.0 * (slot->dcaa.value - slot->baseline_rate) / slot->baseline_rate;
      ++row.used;
    }
    row.mean_gain_percent = row.used ? sum / static_cast<double>(row.used) : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_csv_preamble(std::ostream& out, const char* command, const SimConfig& config,
                               std::uint64_t seed) {
  out << "# mcran " << command << " config_hash=" << hex64(config_hash(config))
      << " seed=" << seed << '\n';
}

inline void write_fig1_csv(std::ostream& out, const SimConfig& config, std::uint64_t seed,
                           const std::vector<Fig1Row>& rows) {
  write_csv_preamble(out, "fig1", config, seed);
  out << "realization,dcaa_rate,chcaa_rate,baseline_rate\n";
  for (const auto& r : rows)
    out << r.realization << ',' << detail::format_real(r.dcaa_rate) << ','
        << detail::format_real(r.chcaa_rate) << ',' << detail::format_real(r.baseline_rate)
        << '\n';
}

inline void write_fig2_csv(std::ostream& out, const SimConfig& config, std::uint64_t seed,
                           const std::vector<Fig2Row>& rows) {
  write_csv_preamble(out, "fig2", config, seed);
  out << "num_users,mean_gain_percent,dropped\n";
  for (const auto& r : rows)
    out << r.num_users << ',' << detail::format_real(r.mean_gain_percent) << ',' << r.dropped
        << '\n';
}

/// Random small instance in the oracle-check family: C in {2,3},
/// U in {3..7}, K_c in {1..3}, alpha in {1,2}, r uniform on [0,10].
template <typename Rng>
GapInstance random_small_instance(Rng& rng) {
  std::uniform_int_distribution<std::size_t> clouds(2, 3);
  std::uniform_int_distribution<std::size_t> users(3, 7);
  std::uniform_int_distribution<std::int64_t> capacity(1, 3);
  std::uniform_int_distribution<std::int64_t> weight(1, 2);
  std::uniform_real_distribution<double> reward(0.0, 10.0);
  const std::size_t C = clouds(rng);
  const std::size_t U = users(rng);
  Matrix<double> r(C, U);
  Matrix<std::int64_t> a(C, U);
  std::vector<std::int64_t> k(C);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t u = 0; u < U; ++u) {
      r(c, u) = reward(rng);
      a(c, u) = weight(rng);
    }
    k[c] = capacity(rng);
  }
  return GapInstance(std::move(r), std::move(a), std::move(k));
}

struct OracleCheckRow {
  std::size_t index = 0;
  double optimum = 0.0;
  AuctionResult exact;
  AuctionResult greedy;
  double chcaa = 0.0;

  bool exact_ok() const { return (1.0 + exact.gamma) * exact.value >= optimum; }
  bool greedy_ok() const { return (1.0 + greedy.gamma) * greedy.value >= optimum; }
};

inline std::vector<OracleCheckRow> run_oracle_check(std::size_t count, std::uint64_t seed,
                                                    unsigned threads = 0) {
  std::vector<OracleCheckRow> rows(count);
  parallel_for(
      count,
      [&](std::size_t i) {
        std::mt19937_64 rng(child_seed(seed, i));
        const auto instance = random_small_instance(rng);
        auto& row = rows[i];
        row.index = i;
        row.optimum = brute_force_optimum(instance).value;
        row.exact = run(instance, KnapsackMethod::kExact);
        row.greedy = run(instance, KnapsackMethod::kGreedy);
        row.chcaa = solve_chcaa(instance).value;
      },
      threads);
  return rows;
}

}  // namespace mcran
