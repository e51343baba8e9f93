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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Optional argv[1]: path of the iteration-count CSV
// (default acceptance_iterations.csv in the working directory).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcran/mcran.hpp"
#include "oracles.hpp"

namespace {

using namespace mcran;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 20260101;
constexpr std::uint64_t kMaxRounds = 100;

struct IterationRecord {
  std::string source;
  std::size_t index = 0;
  std::size_t num_clouds = 0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

class IterationLog {
 public:
  void add(std::string source, std::size_t index, std::size_t clouds, const AuctionResult& r) {
    std::lock_guard lock(mu_);
    rows_.push_back({std::move(source), index, clouds, r.iterations, r.converged});
  }
  const std::vector<IterationRecord>& rows() const { return rows_; }

 private:
  std::mutex mu_;
  std::vector<IterationRecord> rows_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Oracle bound for both knapsack subroutines.
void criterion1(IterationLog& log) {
  const auto start = Clock::now();
  const auto rows = run_oracle_check(500, kSeed);
  std::size_t exact_bad = 0;
  std::size_t greedy_bad = 0;
  std::size_t clouds_seen = 0;
  for (const auto& row : rows) {
    exact_bad += !row.exact_ok() || row.exact.gamma != 1.0;
    greedy_bad += !row.greedy_ok() || row.greedy.gamma != 2.0;
    std::mt19937_64 rng(child_seed(kSeed, row.index));
    clouds_seen = random_small_instance(rng).num_clouds();
    log.add("oracle-exact", row.index, clouds_seen, row.exact);
    log.add("oracle-greedy", row.index, clouds_seen, row.greedy);
  }
  const double secs = seconds_since(start);
  report(1, exact_bad == 0 && greedy_bad == 0 && secs < 60.0,
         fmt("instances=%zu exact_violations=%zu greedy_violations=%zu time=%.2fs (limit 60s)",
             rows.size(), exact_bad, greedy_bad, secs));
}

// Knapsack DP against subset enumeration; greedy at least half of exact.
void criterion2() {
  std::mt19937_64 rng(child_seed(kSeed, 2));
  std::size_t exact_bad = 0;
  std::size_t greedy_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto p = testing::random_knapsack(rng, 12, i % 2 == 0);
    const auto ref = testing::enumerate_knapsack(p);
    const auto exact = solve_exact(p);
    const auto greedy = solve_greedy(p);
    exact_bad += exact.selected != ref.selected || exact.value != ref.value;
    greedy_bad += !(2.0 * greedy.value >= exact.value * (1.0 - 1e-12));
  }
  report(2, exact_bad == 0 && greedy_bad == 0,
         fmt("problems=200 dp_mismatches=%zu greedy_below_half=%zu", exact_bad, greedy_bad));
}

std::string trace_text(const GapInstance& inst) {
  std::ostringstream out;
  write_trace(out, run_traced(inst).trace);
  return out.str();
}

// Hand-traced fixtures.
void criterion3() {
  const std::string i1_expected =
      "t=1 cloud=0 resets=- set=0 prices=5,0,0\n"
      "t=2 cloud=1 resets=- set=1,2 prices=5,6,1\n"
      "t=3 cloud=0 resets=0 set=0 prices=5,6,1\n"
      "t=4 cloud=1 resets=1,2 set=1,2 prices=5,6,1\n";
  const std::string p1_expected =
      "t=1 cloud=0 resets=- set=0 prices=5\n"
      "t=2 cloud=1 resets=- set=0 prices=7\n"
      "t=3 cloud=0 resets=- set=- prices=7\n"
      "t=4 cloud=1 resets=0 set=0 prices=7\n"
      "t=5 cloud=0 resets=- set=- prices=7\n";
  const auto i1 = run_traced(testing::instance_i1());
  const auto p1 = run_traced(testing::instance_p1());
  const bool i1_ok = trace_text(testing::instance_i1()) == i1_expected &&
                     i1.trace[2].solve_prices == std::vector<double>{0, 6, 1} &&
                     i1.result.value == 12.0 && i1.result.converged &&
                     i1.result.assignment.user_to_cloud ==
                         std::vector<std::optional<CloudIndex>>{0, 1, 1};
  const bool p1_ok = trace_text(testing::instance_p1()) == p1_expected &&
                     p1.trace[3].solve_prices == std::vector<double>{0} &&
                     p1.result.value == 7.0 && p1.result.converged &&
                     p1.result.assignment.user_to_cloud ==
                         std::vector<std::optional<CloudIndex>>{1};
  report(3, i1_ok && p1_ok,
         fmt("I1 trace=%s (4 iterations, value 12)  P1 trace=%s (5 iterations, value 7)",
             i1_ok ? "match" : "MISMATCH", p1_ok ? "match" : "MISMATCH"));
}

bool same_run(const GapInstance& inst, KnapsackMethod method) {
  const auto central = run(inst, method, kMaxRounds);
  const auto dist = run_distributed(inst, method, kMaxRounds);
  return !dist.stalled && dist.cross_reads == 0 && dist.result == central;
}

void criterion5_and_4(IterationLog& log) {
  // fig1 realizations, also reused for distributed equivalence.
  const auto start = Clock::now();
  SimConfig base;  // C=7, B=3, U=28, d=500 m
  constexpr std::size_t kRealizations = 100;
  std::vector<std::optional<RealizationOutcome>> outs(kRealizations);
  parallel_for(kRealizations, [&](std::size_t i) {
    SimConfig config = base;
    config.rng_seed = child_seed(kSeed + 5, i);
    outs[i] = run_realization(config);
  });
  double gap_sum = 0.0;
  std::size_t beats = 0;
  double dcaa_sum = 0.0;
  double base_sum = 0.0;
  for (std::size_t i = 0; i < kRealizations; ++i) {
    const auto& o = *outs[i];
    log.add("fig1", i, o.instance.num_clouds(), o.dcaa);
    gap_sum += std::abs(o.dcaa.value - o.chcaa_rate) / o.dcaa.value;
    beats += o.dcaa.value >= o.baseline_rate;
    dcaa_sum += o.dcaa.value;
    base_sum += o.baseline_rate;
  }
  const double fig1_secs = seconds_since(start);
  const double mean_gap = gap_sum / kRealizations;
  const double share = static_cast<double>(beats) / kRealizations;

  // Distributed equivalence: random instances, then every fig1 realization.
  std::mt19937_64 rng(child_seed(kSeed, 4));
  std::size_t random_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_small_instance(rng);
    random_bad += !same_run(inst, i % 2 ? KnapsackMethod::kGreedy : KnapsackMethod::kExact);
  }
  std::size_t fig1_bad = 0;
  for (const auto& o : outs) fig1_bad += !same_run(o->instance, KnapsackMethod::kExact);
  report(4, random_bad == 0 && fig1_bad == 0,
         fmt("random_mismatches=%zu/100 fig1_mismatches=%zu/%zu", random_bad, fig1_bad,
             kRealizations));

  report(5, mean_gap <= 0.10 && share >= 0.95 && dcaa_sum >= base_sum && fig1_secs < 300.0,
         fmt("mean|dcaa-chcaa|/dcaa=%.5f (<=0.10) dcaa>=baseline in %.0f%% (>=95%%) "
             "mean dcaa=%.3f baseline=%.3f time=%.2fs (limit 300s)",
             mean_gap, 100.0 * share, dcaa_sum / kRealizations, base_sum / kRealizations,
             fig1_secs));
}

std::vector<double> ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = (i + j) / 2.0 + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

void criterion6(IterationLog& log) {
  const std::vector<std::size_t> counts{7, 14, 21, 28};
  SimConfig base;
  const auto rows = run_fig2(base, counts, 200, kSeed + 6);
  std::vector<double> users;
  std::vector<double> gains;
  std::string seq;
  for (const auto& row : rows) {
    users.push_back(static_cast<double>(row.num_users));
    gains.push_back(row.mean_gain_percent);
    seq += fmt("%s%zu:%.2f%%", seq.empty() ? "" : " ", row.num_users, row.mean_gain_percent);
    for (std::size_t i = 0; i < row.dcaa_iterations.size(); ++i) {
      AuctionResult r;
      r.iterations = row.dcaa_iterations[i];
      r.converged = row.dcaa_converged[i];
      log.add("fig2-u" + std::to_string(row.num_users), i, base.num_clouds, r);
    }
  }
  const double rho = spearman(users, gains);
  std::size_t dropped = 0;
  for (const auto& row : rows) dropped += row.dropped;
  report(6, gains.back() > gains.front() && rho > 0.0,
         fmt("realizations=200 gains {%s} spearman=%.3f (>0) dropped=%zu", seq.c_str(), rho,
             dropped));
}

void criterion7(const IterationLog& log, const std::string& csv_path) {
  std::size_t bad = 0;
  std::uint64_t worst = 0;
  std::ofstream csv(csv_path);
  csv << "source,index,num_clouds,iterations,converged\n";
  for (const auto& r : log.rows()) {
    const bool ok = r.converged && r.iterations < kMaxRounds * r.num_clouds;
    bad += !ok;
    worst = std::max(worst, r.iterations);
    csv << r.source << ',' << r.index << ',' << r.num_clouds << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << '\n';
  }
  report(7, bad == 0 && csv.good(),
         fmt("runs=%zu unconverged_or_capped=%zu max_iterations=%llu csv=%s", log.rows().size(),
             bad, static_cast<unsigned long long>(worst), csv_path.c_str()));
}

// Randomized invariants across every module.
void criterion8() {
  std::atomic<std::size_t> cases{0};
  std::atomic<std::size_t> bad{0};
  auto check = [&](bool ok) {
    ++cases;
    if (!ok) ++bad;
  };

  constexpr std::size_t kGap = 10000;
  parallel_for(kGap, [&](std::size_t i) {
    std::mt19937_64 rng(child_seed(kSeed + 8, i));
    const auto inst = random_small_instance(rng);
    AuctionOptions options;
    options.method = i % 2 ? KnapsackMethod::kGreedy : KnapsackMethod::kExact;
    const auto traced = run_traced(inst, options);
    bool ok = evaluate(inst, traced.result.assignment).feasible;
    for (const auto& rec : traced.trace) {
      for (double p : rec.prices) ok = ok && p >= 0.0;
      for (auto u : rec.selected) ok = ok && inst.reward(rec.cloud, u) - rec.solve_prices[u] > 0.0;
    }
    const auto again = run_traced(inst, options);
    ok = ok && again.trace == traced.trace && again.result == traced.result;
    ok = ok && evaluate(inst, solve_chcaa(inst).assignment).feasible;
    check(ok);
  });

  constexpr std::size_t kKnapsack = 2000;
  parallel_for(kKnapsack, [&](std::size_t i) {
    std::mt19937_64 rng(child_seed(kSeed + 9, i));
    const auto p = testing::random_knapsack(rng, 12, i % 2 == 0);
    bool ok = true;
    for (const auto& s : {solve_exact(p), solve_greedy(p)}) {
      std::int64_t w = 0;
      for (auto k : s.selected) {
        ok = ok && p.profits[k] > 0.0;
        w += p.weights[k];
      }
      ok = ok && w <= p.capacity;
    }
    check(ok);
  });

  constexpr std::size_t kSim = 200;
  parallel_for(kSim, [&](std::size_t i) {
    SimConfig config;
    config.rng_seed = child_seed(kSeed + 10, i);
    config.num_users = 1 + i % 40;
    config.shadowing = i % 3 == 0;
    const auto ch = sample_channels(generate_layout(config), config);
    const auto inst = compute_rewards(ch, config);
    bool ok = true;
    for (double r : inst.rewards().data()) ok = ok && std::isfinite(r) && r >= 0.0;
    ok = ok && compute_rewards(sample_channels(generate_layout(config), config), config) == inst;
    const auto base = baseline_bs_association(ch, config);
    ok = ok && evaluate(base.instance, base.assignment).feasible;
    check(ok);
  });

  report(8, cases >= 10000 && bad == 0,
         fmt("cases=%zu (>=10000) violations=%zu", cases.load(), bad.load()));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string csv_path = argc > 1 ? argv[1] : "acceptance_iterations.csv";
  IterationLog log;
  try {
    criterion1(log);
    criterion2();
    criterion3();
    criterion5_and_4(log);
    criterion6(log);
    criterion7(log, csv_path);
    criterion8();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
