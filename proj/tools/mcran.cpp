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

// mcran command-line front end.
//
// Exit codes: 0 success, 2 input error, 3 internal assertion failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcran/mcran.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitAssert = 3;

/// Raised when a solver output breaks a guarantee the library promises.
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 1;
  std::size_t realizations = 0;
  std::optional<std::size_t> users;
  std::optional<double> intercell_distance;
  std::string out_path;
  unsigned threads = 0;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw mcran::InvalidInput("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string input_context;

mcran::SimConfig load_config(const CommonOptions& opts) {
  mcran::SimConfig config;
  if (!opts.config_path.empty()) {
    input_context = opts.config_path;
    config = mcran::read_sim_config_file(opts.config_path);
    input_context.clear();
  }
  if (opts.users) config.num_users = *opts.users;
  if (opts.intercell_distance) config.intercell_distance = *opts.intercell_distance;
  config.validate();
  return config;
}

const std::map<std::string, std::string> kSolvers{
    {"dcaa-exact", "auction with exact knapsack"},
    {"dcaa-greedy", "auction with greedy knapsack"},
    {"dcaa-distributed", "message-passing auction, exact knapsack"},
    {"chcaa", "greedy largest-reward-first"},
    {"oracle", "exhaustive search"},
};

struct SolveRow {
  std::string solver;
  double value = 0.0;
  bool feasible = true;
  std::optional<std::uint64_t> iterations;
  std::optional<bool> converged;
  std::optional<double> gamma;
};

SolveRow solve_with(const mcran::GapInstance& instance, const std::string& solver,
                    std::uint64_t max_rounds, std::vector<mcran::StepRecord>* trace) {
  SolveRow row;
  row.solver = solver;
  mcran::Assignment assignment;
  if (solver == "dcaa-exact" || solver == "dcaa-greedy") {
    mcran::AuctionOptions options;
    options.method = solver == "dcaa-exact" ? mcran::KnapsackMethod::kExact
                                            : mcran::KnapsackMethod::kGreedy;
    options.max_rounds = max_rounds;
    auto run = mcran::run_traced(instance, options);
    if (trace) *trace = std::move(run.trace);
    assignment = run.result.assignment;
    row.iterations = run.result.iterations;
    row.converged = run.result.converged;
    row.gamma = run.result.gamma;
  } else if (solver == "dcaa-distributed") {
    auto run = mcran::run_distributed(instance, mcran::KnapsackMethod::kExact, max_rounds);
    if (run.stalled) throw AssertionFailure("distributed auction stalled");
    if (run.cross_reads != 0) throw AssertionFailure("agent read non-local state");
    if (trace) *trace = std::move(run.trace);
    assignment = run.result.assignment;
    row.iterations = run.result.iterations;
    row.converged = run.result.converged;
    row.gamma = run.result.gamma;
  } else if (solver == "chcaa") {
    assignment = mcran::solve_chcaa(instance).assignment;
  } else if (solver == "oracle") {
    assignment = mcran::brute_force_optimum(instance).assignment;
  } else {
    throw mcran::InvalidInput("unknown solver '" + solver + "'");
  }
  const auto report = mcran::evaluate(instance, assignment);
  row.value = report.value;
  row.feasible = report.feasible;
  if (!report.feasible) throw AssertionFailure(solver + " returned an infeasible assignment");
  return row;
}

void write_solve_header(std::ostream& out) {
  out << "solver,value,feasible,iterations,converged,certificate\n";
}

void write_solve_row(std::ostream& out, const SolveRow& row, std::optional<double> certificate) {
  using mcran::detail::format_real;
  out << row.solver << ',' << format_real(row.value) << ',' << (row.feasible ? 1 : 0) << ',';
  if (row.iterations) out << *row.iterations;
  out << ',';
  if (row.converged) out << (*row.converged ? 1 : 0);
  out << ',';
  if (certificate) out << format_real(*certificate);
  out << '\n';
}

std::optional<double> check_bound(const SolveRow& row, std::optional<double> optimum) {
  if (!optimum) return std::nullopt;
  if (row.value > *optimum + 1e-9 * std::max(1.0, *optimum))
    throw AssertionFailure(row.solver + " beat the exhaustive optimum");
  if (!row.gamma) return *optimum == 0.0 ? 1.0 : *optimum / row.value;
  mcran::AuctionResult as_result;
  as_result.value = row.value;
  const double ratio = mcran::certificate(as_result, *optimum);
  if (ratio > 1.0 + *row.gamma)
    throw AssertionFailure(row.solver + " violates the (1+gamma) bound: ratio " +
                           mcran::detail::format_real(ratio));
  return ratio;
}

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> counts;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    const auto n = mcran::detail::parse_number<std::int64_t>(item, 1);
    if (n < 1) throw mcran::InvalidInput("user counts must be positive");
    counts.push_back(static_cast<std::size_t>(n));
  }
  if (counts.empty()) throw mcran::InvalidInput("empty user-count list");
  return counts;
}

void add_sim_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "SimConfig key=value file");
  cmd->add_option("--seed", opts.seed, "Master seed");
  cmd->add_option("--users", opts.users, "Number of users");
  cmd->add_option("--intercell-distance", opts.intercell_distance, "Intercell distance in meters");
  cmd->add_option("--out", opts.out_path, "Output path (default stdout)");
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-to-cloud association for multicloud radio access networks"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string instance_path;
  std::string solver = "dcaa-exact";
  std::string trace_path;
  std::string rewards_csv;
  std::string user_counts = "7,14,21,28";
  std::uint64_t max_rounds = 100;
  bool with_oracle = false;

  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  solve->add_option("instance", instance_path, "Instance file")->required();
  solve->add_option("--solver", solver, "dcaa-exact | dcaa-greedy | dcaa-distributed | chcaa | oracle")
      ->check(CLI::IsMember(kSolvers));
  solve->add_flag("--oracle", with_oracle, "Also run the exhaustive oracle and check the bound");
  solve->add_option("--max-rounds", max_rounds, "Auction round cap")->check(CLI::PositiveNumber);
  solve->add_option("--trace", trace_path, "Write the auction trace here");
  solve->add_option("--out", opts.out_path, "Output path (default stdout)");

  auto* compare = app.add_subcommand("compare", "Run every solver on one instance file");
  compare->add_option("instance", instance_path, "Instance file")->required();
  compare->add_option("--max-rounds", max_rounds, "Auction round cap")->check(CLI::PositiveNumber);
  compare->add_option("--out", opts.out_path, "Output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Draw one network realization as an instance file");
  add_sim_flags(simulate, opts);
  simulate->add_option("--rewards-csv", rewards_csv, "Also export the reward matrix as CSV");

  auto* oracle = app.add_subcommand("oracle-check", "Check auction bounds against the oracle");
  oracle->add_option("--seed", opts.seed, "Master seed");
  oracle->add_option("--realizations", opts.realizations, "Number of random instances")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--out", opts.out_path, "Per-instance CSV (default: summary only)");
  oracle->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");

  auto* fig1 = app.add_subcommand("fig1", "Sum-rate per realization: auction, greedy, cloud-less");
  add_sim_flags(fig1, opts);
  fig1->add_option("--realizations", opts.realizations, "Realizations")->check(CLI::PositiveNumber);

  auto* fig2 = app.add_subcommand("fig2", "Mean gain over the cloud-less baseline vs user count");
  add_sim_flags(fig2, opts);
  fig2->add_option("--realizations", opts.realizations, "Realizations per user count")
      ->check(CLI::PositiveNumber);
  fig2->add_option("--user-counts", user_counts, "Comma-separated user counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*solve || *compare) {
      input_context = instance_path;
      const auto instance = mcran::read_instance_file(instance_path);
      input_context.clear();
      Output out(opts.out_path);
      write_solve_header(out.stream());
      std::optional<double> optimum;
      if (*compare || with_oracle || solver == "oracle")
        optimum = mcran::brute_force_optimum(instance).value;
      if (*solve) {
        std::vector<mcran::StepRecord> trace;
        const auto row = solve_with(instance, solver, max_rounds, trace_path.empty() ? nullptr : &trace);
        const auto cert = with_oracle ? check_bound(row, optimum) : std::nullopt;
        write_solve_row(out.stream(), row, cert);
        if (!trace_path.empty()) {
          Output trace_out(trace_path);
          mcran::write_trace(trace_out.stream(), trace);
        }
      } else {
        for (const auto& [name, _] : kSolvers) {
          const auto row = solve_with(instance, name, max_rounds, nullptr);
          write_solve_row(out.stream(), row, check_bound(row, optimum));
        }
      }
      return kExitOk;
    }

    if (*simulate) {
      auto config = load_config(opts);
      config.rng_seed = opts.seed;
      const auto layout = mcran::generate_layout(config);
      const auto channels = mcran::sample_channels(layout, config);
      const auto instance = mcran::compute_rewards(channels, config);
      Output out(opts.out_path);
      out.stream() << "# mcran simulate config_hash=" << mcran::hex64(mcran::config_hash(config))
                   << '\n';
      mcran::write_instance(out.stream(), instance);
      if (!rewards_csv.empty()) {
        Output csv(rewards_csv);
        mcran::write_rewards_csv(csv.stream(), instance);
      }
      return kExitOk;
    }

    if (*oracle) {
      const std::size_t count = opts.realizations ? opts.realizations : 500;
      const auto rows = mcran::run_oracle_check(count, opts.seed, opts.threads);
      std::size_t violations = 0;
      std::size_t unconverged = 0;
      if (!opts.out_path.empty()) {
        Output out(opts.out_path);
        out.stream() << "# mcran oracle-check seed=" << opts.seed << '\n'
                     << "instance,optimum,dcaa_exact,dcaa_greedy,chcaa,exact_ok,greedy_ok\n";
        for (const auto& r : rows) {
          using mcran::detail::format_real;
          out.stream() << r.index << ',' << format_real(r.optimum) << ','
                       << format_real(r.exact.value) << ',' << format_real(r.greedy.value) << ','
                       << format_real(r.chcaa) << ',' << r.exact_ok() << ',' << r.greedy_ok()
                       << '\n';
        }
      }
      for (const auto& r : rows) {
        violations += !r.exact_ok() + !r.greedy_ok();
        unconverged += !r.exact.converged + !r.greedy.converged;
      }
      std::cout << "instances=" << rows.size() << " bound_violations=" << violations
                << " unconverged=" << unconverged << '\n';
      return violations || unconverged ? kExitAssert : kExitOk;
    }

    if (*fig1) {
      const auto config = load_config(opts);
      const std::size_t n = opts.realizations ? opts.realizations : 100;
      const auto rows = mcran::run_fig1(config, n, opts.seed, opts.threads);
      Output out(opts.out_path);
      mcran::write_fig1_csv(out.stream(), config, opts.seed, rows);
      return kExitOk;
    }

    if (*fig2) {
      const auto config = load_config(opts);
      const std::size_t n = opts.realizations ? opts.realizations : 200;
      const auto rows = mcran::run_fig2(config, parse_counts(user_counts), n, opts.seed, opts.threads);
      Output out(opts.out_path);
      mcran::write_fig2_csv(out.stream(), config, opts.seed, rows);
      return kExitOk;
    }
  } catch (const mcran::ParseError& e) {
    std::cerr << "error: " << (input_context.empty() ? "" : input_context + ": ") << e.what()
              << '\n';
    return kExitInput;
  } catch (const mcran::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const mcran::InstanceTooLarge& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const AssertionFailure& e) {
    std::cerr << "assertion failed: " << e.what() << '\n';
    return kExitAssert;
  }
  return kExitOk;
}
