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

// Experiment commands behind the command-line tool. Each writes a CSV table
// (header row, comma separated, shortest round-trip number formatting) to
// the given stream.
//
//   allocate:   sweep_value,group,workers,mu,alpha,load_real,load_int,r_star,
//               q_star,xi_star,n_star,rate,t_star,N,n_times_t_star,status
//   simulate:   scheme,N,mean_latency,std_error,t_star,sweep_value,n,trials,
//               seed,status
//   sweep-rate: rate,mean_latency,std_error,scheme,n,status
//   verify:     oracle,max_abs_error,max_rel_error,samples,tolerance,pass
//
// A row whose status is not "ok" may carry nan in its numeric cells.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "coded_alloc/allocation.hpp"
#include "coded_alloc/cluster.hpp"
#include "coded_alloc/config.hpp"
#include "coded_alloc/errors.hpp"
#include "coded_alloc/latency_mc.hpp"
#include "coded_alloc/verification.hpp"

namespace coded_alloc {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

/// Short machine-readable status for a failed row.
inline std::string status_of(const std::exception& e) {
  if (dynamic_cast<const Infeasible*>(&e)) return "infeasible";
  if (dynamic_cast<const NoSolution*>(&e)) return "no-solution";
  if (dynamic_cast<const UnderflowError*>(&e)) return "underflow";
  if (dynamic_cast<const InvalidRate*>(&e)) return "invalid-rate";
  if (dynamic_cast<const ShiftMismatch*>(&e)) return "shift-mismatch";
  if (dynamic_cast<const DomainError*>(&e)) return "domain-error";
  return "error";
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& cell(double v) { return cell(format_number(v)); }
  CsvWriter& cell(std::int64_t v) { return cell(std::to_string(v)); }
  CsvWriter& cell(std::size_t v) { return cell(std::to_string(v)); }

  void end_row() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }

  std::ostream& out_;
  bool first_ = true;
};

struct SweepPoint {
  double value;
  ClusterSpec cluster;
};

enum class RateSweep { Reject, Ignore };

// A rate sweep leaves the cluster unchanged; commands that do not vary the
// code rate either reject it or treat it as a single point.
inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg, RateSweep rate) {
  if (!cfg.sweep) return {{1.0, cfg.cluster}};
  if (cfg.sweep->variable == SweepVariable::Rate) {
    if (rate == RateSweep::Ignore) return {{1.0, cfg.cluster}};
    throw ConfigError("a rate sweep is only valid for the sweep-rate command");
  }
  std::vector<SweepPoint> points;
  for (double v : cfg.sweep->grid) points.push_back({v, apply_sweep(cfg.cluster, *cfg.sweep, v)});
  return points;
}

}  // namespace detail

/// Code length of a uniform scheme with the given rate: ceil(k / rate).
inline std::int64_t code_length_for_rate(std::int64_t k, double rate) {
  if (!(rate > 0.0 && rate <= 1.0)) throw InvalidRate("rate must lie in (0, 1]");
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(k) / rate - 1e-9));
}

/// Allocation selected by a scheme selector on one cluster. `optimal` is the
/// optimal allocation of the same cluster (supplies n* for uniform(n=n*)).
inline Allocation build_allocation(const SchemeSelector& s, const ClusterSpec& cluster,
                                   const Allocation& optimal) {
  switch (s.kind) {
    case SchemeKind::Optimal:
      return optimal;
    case SchemeKind::Uncoded:
      return uniform_allocation_fixed_n(cluster, cluster.k);
    case SchemeKind::Uniform: {
      std::int64_t n = 0;
      if (s.n_star) {
        n = static_cast<std::int64_t>(std::ceil(optimal.n_real - 1e-9));
      } else if (s.n) {
        n = *s.n;
      } else {
        n = code_length_for_rate(cluster.k, s.rate.value_or(1.0));
      }
      return uniform_allocation_fixed_n(cluster, n);
    }
    case SchemeKind::FixedR:
      return fixed_r_allocation(cluster, s.r.value_or(1)).allocation;
    case SchemeKind::Reisizadeh:
      return reisizadeh_allocation(cluster);
  }
  throw ConfigError("unknown scheme");
}

inline SimulationOptions simulation_options(const ExperimentConfig& cfg, unsigned threads) {
  SimulationOptions o;
  o.trials = cfg.trials;
  o.seed = cfg.seed;
  o.loads = cfg.loads;
  o.threads = threads;
  return o;
}

/// Optimal allocation table, one row per group per sweep point.
inline void run_allocate(const ExperimentConfig& cfg, std::ostream& out) {
  detail::CsvWriter csv(out);
  for (const char* h : {"sweep_value", "group", "workers", "mu", "alpha", "load_real",
                        "load_int", "r_star", "q_star", "xi_star", "n_star", "rate", "t_star",
                        "N", "n_times_t_star", "status"}) {
    csv.cell(std::string(h));
  }
  csv.end_row();
  for (const auto& pt : detail::sweep_points(cfg, detail::RateSweep::Ignore)) {
    const auto n_total = pt.cluster.total_workers();
    try {
      const auto opt = optimal_allocation(pt.cluster, cfg.model);
      for (std::size_t j = 0; j < pt.cluster.group_count(); ++j) {
        const auto& g = pt.cluster.groups[j];
        csv.cell(pt.value).cell(j).cell(g.workers).cell(g.mu).cell(g.alpha)
            .cell(opt.allocation.loads_real[j]).cell(opt.allocation.loads_int[j])
            .cell(opt.point.r_star[j]).cell(opt.point.q_star[j]).cell(opt.point.xi_star[j])
            .cell(opt.allocation.n_real).cell(opt.allocation.rate(pt.cluster))
            .cell(opt.point.t_star).cell(n_total)
            .cell(static_cast<double>(n_total) * opt.point.t_star).cell(std::string("ok"));
        csv.end_row();
      }
    } catch (const Error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      for (std::size_t j = 0; j < pt.cluster.group_count(); ++j) {
        const auto& g = pt.cluster.groups[j];
        csv.cell(pt.value).cell(j).cell(g.workers).cell(g.mu).cell(g.alpha);
        for (int c = 0; c < 8; ++c) csv.cell(detail::kNaN);
        csv.cell(n_total).cell(detail::kNaN).cell(status_of(e));
        csv.end_row();
      }
    }
  }
}

/// Monte Carlo latency of every configured scheme at every sweep point.
inline void run_simulate(const ExperimentConfig& cfg, std::ostream& out, unsigned threads = 0) {
  const auto points = detail::sweep_points(cfg, detail::RateSweep::Reject);
  detail::CsvWriter csv(out);
  for (const char* h : {"scheme", "N", "mean_latency", "std_error", "t_star", "sweep_value",
                        "n", "trials", "seed", "status"}) {
    csv.cell(std::string(h));
  }
  csv.end_row();
  const auto options = simulation_options(cfg, threads);
  for (const auto& pt : points) {
    const auto n_total = pt.cluster.total_workers();
    std::optional<OptimalAllocation> opt;
    std::string opt_status = "ok";
    try {
      opt = optimal_allocation(pt.cluster, cfg.model);
    } catch (const Error& e) {
      opt_status = status_of(e);
    }
    for (const auto& s : cfg.schemes) {
      csv.cell(scheme_label(s)).cell(n_total);
      if (!opt) {
        for (int c = 0; c < 3; ++c) csv.cell(detail::kNaN);
        csv.cell(pt.value).cell(detail::kNaN).cell(cfg.trials).cell(std::to_string(cfg.seed)).cell(opt_status);
        csv.end_row();
        continue;
      }
      try {
        const auto alloc = build_allocation(s, pt.cluster, opt->allocation);
        const auto est = simulate_latency(pt.cluster, alloc, cfg.model, options);
        const double n = cfg.loads == LoadKind::Integer ? static_cast<double>(alloc.n_int)
                                                        : alloc.n_real;
        csv.cell(est.mean).cell(est.std_error).cell(opt->point.t_star).cell(pt.value).cell(n)
            .cell(cfg.trials).cell(std::to_string(cfg.seed)).cell(std::string("ok"));
      } catch (const Error& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        csv.cell(detail::kNaN).cell(detail::kNaN).cell(opt->point.t_star).cell(pt.value)
            .cell(detail::kNaN).cell(cfg.trials).cell(std::to_string(cfg.seed)).cell(status_of(e));
      }
      csv.end_row();
    }
  }
}

/// Uniform-allocation latency over a grid of code rates, plus the optimal
/// scheme as a reference row at its own rate k/n*.
inline void run_sweep_rate(const ExperimentConfig& cfg, std::ostream& out,
                           unsigned threads = 0) {
  if (!cfg.sweep || cfg.sweep->variable != SweepVariable::Rate) {
    throw ConfigError("sweep-rate needs a sweep with variable \"rate\"");
  }
  detail::CsvWriter csv(out);
  for (const char* h : {"rate", "mean_latency", "std_error", "scheme", "n", "status"}) {
    csv.cell(std::string(h));
  }
  csv.end_row();
  const auto options = simulation_options(cfg, threads);
  const auto& cluster = cfg.cluster;
  for (double rate : cfg.sweep->grid) {
    try {
      const auto n = code_length_for_rate(cluster.k, rate);
      const auto alloc = uniform_allocation_fixed_n(cluster, n);
      const auto est = simulate_latency(cluster, alloc, cfg.model, options);
      csv.cell(rate).cell(est.mean).cell(est.std_error).cell(std::string("uniform")).cell(n)
          .cell(std::string("ok"));
    } catch (const Error& e) {
      csv.cell(rate).cell(detail::kNaN).cell(detail::kNaN).cell(std::string("uniform"))
          .cell(detail::kNaN).cell(status_of(e));
    }
    csv.end_row();
  }
  try {
    const auto opt = optimal_allocation(cluster, cfg.model);
    const auto est = simulate_latency(cluster, opt.allocation, cfg.model, options);
    csv.cell(opt.allocation.rate(cluster)).cell(est.mean).cell(est.std_error)
        .cell(std::string("optimal")).cell(opt.allocation.n_real).cell(std::string("ok"));
  } catch (const Error& e) {
    csv.cell(detail::kNaN).cell(detail::kNaN).cell(detail::kNaN).cell(std::string("optimal"))
        .cell(detail::kNaN).cell(status_of(e));
  }
  csv.end_row();
}

/// Runs the oracle suite on the configured cluster. Returns true when every
/// oracle passes.
inline bool run_verify(const ExperimentConfig& cfg, std::ostream& out) {
  oracle::VerifyOptions options;
  options.trials = cfg.trials;
  options.seed = cfg.seed;
  options.model = cfg.model;
  const auto reports = oracle::run_oracles(cfg.cluster, options);
  detail::CsvWriter csv(out);
  for (const char* h :
       {"oracle", "max_abs_error", "max_rel_error", "samples", "tolerance", "pass"}) {
    csv.cell(std::string(h));
  }
  csv.end_row();
  bool all = true;
  for (const auto& r : reports) {
    csv.cell(r.name).cell(r.max_abs_error).cell(r.max_rel_error).cell(r.samples)
        .cell(r.tolerance).cell(std::string(r.pass ? "true" : "false"));
    csv.end_row();
    all = all && r.pass;
  }
  return all;
}

}  // namespace coded_alloc
