// Copyright 2026 The coded-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// coded-alloc: allocate | simulate | sweep-rate | verify
//
// Exit status: 0 success, 1 oracle failure, 2 configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coded_alloc/coded_alloc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOracleFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out_path;
  std::optional<std::string> model;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "override the master seed");
  cmd->add_option("--trials", args.trials, "override the Monte Carlo trial count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", args.out_path, "write CSV here instead of stdout");
  cmd->add_option("--model", args.model, "runtime model")
      ->check(CLI::IsMember({"per-task", "per-row"}));
  cmd->add_option("--threads", args.threads, "worker threads (0: all cores)");
}

coded_alloc::ExperimentConfig load(const CommonArgs& args) {
  auto cfg = coded_alloc::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.out_path) cfg.output_path = *args.out_path;
  if (args.model) cfg.model = coded_alloc::parse_runtime_model(*args.model);
  return cfg;
}

// Prints violations; true when any of them is an error.
bool report_violations(const coded_alloc::ClusterSpec& cluster) {
  const auto violations = coded_alloc::validate_cluster(cluster);
  for (const auto& v : violations) {
    std::cerr << (v.severity == coded_alloc::Severity::Error ? "error: " : "warning: ")
              << coded_alloc::to_string(v.code) << ": " << v.message << '\n';
  }
  return coded_alloc::has_errors(violations);
}

template <class Command>
int run_with_output(const coded_alloc::ExperimentConfig& cfg, Command&& command) {
  if (cfg.output_path.empty()) return command(std::cout);
  std::ofstream file(cfg.output_path);
  if (!file) {
    std::cerr << "error: cannot open output file '" << cfg.output_path << "'\n";
    return kExitConfigError;
  }
  return command(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal load allocation for coded computation on heterogeneous clusters"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* allocate = app.add_subcommand("allocate", "optimal loads, finisher counts and bound");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo latency of each scheme");
  auto* sweep_rate = app.add_subcommand("sweep-rate", "uniform-scheme latency over code rates");
  auto* verify = app.add_subcommand("verify", "run the brute-force oracles");
  for (auto* cmd : {allocate, simulate, sweep_rate, verify}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    const auto cfg = load(args);
    if (report_violations(cfg.cluster)) return kExitConfigError;

    if (allocate->parsed()) {
      return run_with_output(cfg, [&](std::ostream& out) {
        coded_alloc::run_allocate(cfg, out);
        return kExitOk;
      });
    }
    if (simulate->parsed()) {
      return run_with_output(cfg, [&](std::ostream& out) {
        coded_alloc::run_simulate(cfg, out, args.threads);
        return kExitOk;
      });
    }
    if (sweep_rate->parsed()) {
      return run_with_output(cfg, [&](std::ostream& out) {
        coded_alloc::run_sweep_rate(cfg, out, args.threads);
        return kExitOk;
      });
    }
    return run_with_output(cfg, [&](std::ostream& out) {
      return coded_alloc::run_verify(cfg, out) ? kExitOk : kExitOracleFailure;
    });
  } catch (const coded_alloc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const coded_alloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
