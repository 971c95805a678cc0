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

// Monte Carlo estimation of the overall latency: the instant at which the
// master holds k coded rows from whole finished subtasks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "coded_alloc/cluster.hpp"
#include "coded_alloc/errors.hpp"

namespace coded_alloc {

/// Counter-based uniform variates: the value for (seed, trial, worker) is a
/// pure function of the triple, so results do not depend on scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  /// Uniform variate in the open interval (0, 1).
  double uniform(std::uint64_t trial, std::uint64_t worker) const noexcept {
    const std::uint64_t t = mix(key_ + 0x9e3779b97f4a7c15ULL * (trial + 1));
    const std::uint64_t bits = mix(t ^ (0xbf58476d1ce4e5b9ULL * (worker + 1)));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

/// Inverse-CDF sample of one worker's completion time for uniform variate u.
///
/// PerTask: (l/k) (alpha - log(1-u)/mu). PerRow: l (alpha - log(1-u)/mu).
inline double sample_worker_time(const GroupSpec& group, double load, std::int64_t k,
                                 RuntimeModel model, double u) {
  const double tail = -std::log1p(-u) / group.mu;
  const double scale = model == RuntimeModel::PerTask ? load / static_cast<double>(k) : load;
  return scale * (group.alpha + tail);
}

struct TrialOutcome {
  double completion_time = 0.0;
  std::vector<std::int64_t> finishers_per_group;

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

enum class LoadKind { Integer, Real };

struct SimulationOptions {
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  LoadKind loads = LoadKind::Integer;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

// Real-valued loads sum to k only up to rounding; accept that much slack.
inline constexpr double kRowSlack = 1e-12;

struct Finish {
  double time;
  std::uint32_t worker;
};

inline bool finish_before(const Finish& a, const Finish& b) noexcept {
  return a.time < b.time || (a.time == b.time && a.worker < b.worker);
}

// Reusable per-thread buffers for one simulated configuration.
class TrialRunner {
 public:
  TrialRunner(const ClusterSpec& cluster, std::span<const double> loads, RuntimeModel model,
              std::uint64_t seed)
      : cluster_(cluster), loads_(loads.begin(), loads.end()), model_(model), rng_(seed) {
    for (std::size_t j = 0; j < cluster.group_count(); ++j) {
      worker_group_.insert(worker_group_.end(),
                           static_cast<std::size_t>(cluster.groups[j].workers),
                           static_cast<std::uint32_t>(j));
    }
    finishes_.resize(worker_group_.size());
    prefix_guess_ = worker_group_.size();
    needed_ = static_cast<double>(cluster.k) * (1.0 - kRowSlack);
  }

  TrialOutcome run(std::uint64_t trial) {
    const std::size_t n = finishes_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = worker_group_[i];
      const double u = rng_.uniform(trial, i);
      finishes_[i] = {sample_worker_time(cluster_.groups[j], loads_[j], cluster_.k, model_, u),
                      static_cast<std::uint32_t>(i)};
    }

    // Only the finishers up to the crossing point need ordering; select a
    // prefix first and fall back to sorting the rest if it runs short.
    const std::size_t prefix = std::min(n, prefix_guess_);
    const auto first = finishes_.begin();
    if (prefix < n) {
      std::nth_element(first, first + static_cast<std::ptrdiff_t>(prefix), finishes_.end(),
                       finish_before);
    }
    std::sort(first, first + static_cast<std::ptrdiff_t>(prefix), finish_before);

    TrialOutcome out;
    out.finishers_per_group.assign(cluster_.group_count(), 0);
    double rows = 0.0;
    std::size_t i = 0;
    auto scan = [&](std::size_t end) {
      for (; i < end; ++i) {
        const auto j = worker_group_[finishes_[i].worker];
        rows += loads_[j];
        ++out.finishers_per_group[j];
        if (rows >= needed_) {
          out.completion_time = finishes_[i].time;
          return true;
        }
      }
      return false;
    };
    bool done = scan(prefix);
    if (!done) {
      std::sort(first + static_cast<std::ptrdiff_t>(prefix), finishes_.end(), finish_before);
      done = scan(n);
    }
    if (!done) throw Infeasible("trial ended without k rows");
    prefix_guess_ = std::min(n, i + 1 + (i + 1) / 8 + 64);
    return out;
  }

 private:
  const ClusterSpec& cluster_;
  std::vector<double> loads_;
  RuntimeModel model_;
  CounterRng rng_;
  std::vector<std::uint32_t> worker_group_;
  std::vector<Finish> finishes_;
  std::size_t prefix_guess_ = 0;
  double needed_ = 0.0;
};

inline std::vector<double> simulation_loads(const Allocation& alloc, LoadKind kind) {
  if (kind == LoadKind::Real) return alloc.loads_real;
  return {alloc.loads_int.begin(), alloc.loads_int.end()};
}

inline void check_feasible(const ClusterSpec& cluster, std::span<const double> loads) {
  if (loads.size() != cluster.group_count()) {
    throw DomainError("allocation does not cover every group");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < loads.size(); ++j) {
    if (!(loads[j] > 0.0)) throw DomainError("loads must be positive");
    total += static_cast<double>(cluster.groups[j].workers) * loads[j];
  }
  if (total < static_cast<double>(cluster.k) * (1.0 - kRowSlack)) {
    throw Infeasible("allocation holds " + std::to_string(total) + " coded rows < k = " +
                     std::to_string(cluster.k));
  }
}

template <class PerTrial>
void for_each_trial(std::size_t trials, unsigned threads, PerTrial&& make_worker) {
  unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  count = static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(trials, 1)));
  if (count <= 1) {
    make_worker(std::size_t{0}, trials);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(count);
  const std::size_t chunk = (trials + count - 1) / count;
  for (unsigned t = 0; t < count; ++t) {
    const std::size_t begin = std::min(trials, t * chunk);
    const std::size_t end = std::min(trials, begin + chunk);
    pool.emplace_back([&make_worker, begin, end] { make_worker(begin, end); });
  }
}

}  // namespace detail

/// Per-trial outcomes in trial order. Identical for equal inputs whatever the
/// thread count.
inline std::vector<TrialOutcome> simulate_outcomes(const ClusterSpec& cluster,
                                                   const Allocation& alloc, RuntimeModel model,
                                                   const SimulationOptions& options) {
  if (options.trials < 1) throw DomainError("simulation needs at least one trial");
  const auto loads = detail::simulation_loads(alloc, options.loads);
  detail::check_feasible(cluster, loads);
  std::vector<TrialOutcome> outcomes(options.trials);
  detail::for_each_trial(options.trials, options.threads,
                         [&](std::size_t begin, std::size_t end) {
                           detail::TrialRunner runner(cluster, loads, model, options.seed);
                           for (std::size_t t = begin; t < end; ++t) outcomes[t] = runner.run(t);
                         });
  return outcomes;
}

/// Mean and standard error of the completion time over independent trials.
inline LatencyEstimate simulate_latency(const ClusterSpec& cluster, const Allocation& alloc,
                                        RuntimeModel model, const SimulationOptions& options) {
  if (options.trials < 1) throw DomainError("simulation needs at least one trial");
  const auto loads = detail::simulation_loads(alloc, options.loads);
  detail::check_feasible(cluster, loads);
  std::vector<double> times(options.trials);
  detail::for_each_trial(options.trials, options.threads,
                         [&](std::size_t begin, std::size_t end) {
                           detail::TrialRunner runner(cluster, loads, model, options.seed);
                           for (std::size_t t = begin; t < end; ++t) {
                             times[t] = runner.run(t).completion_time;
                           }
                         });

  // Compensated sums in trial order keep the result independent of how the
  // trials were scheduled.
  auto neumaier = [](std::span<const double> xs, auto&& term) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : xs) {
      const double v = term(x);
      const double t = sum + v;
      comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
    return sum + comp;
  };
  const double n = static_cast<double>(times.size());
  const double mean = neumaier(times, [](double x) { return x; }) / n;
  double std_error = 0.0;
  if (times.size() > 1) {
    const double ss = neumaier(times, [mean](double x) { return (x - mean) * (x - mean); });
    std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return {mean, std_error, options.trials, options.seed};
}

/// Asymptotic variance q(1-q) / (N_j f_j(eta_j)^2) of the central order
/// statistic of index q*N_j in group j, where eta_j is the q-quantile of the
/// worker completion time at the given load and f_j its density there.
inline double asymptotic_variance(const GroupSpec& group, double load, double q,
                                  const ClusterSpec& cluster,
                                  RuntimeModel model = RuntimeModel::PerTask) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("asymptotic_variance: q must lie in (0, 1)");
  if (!(load > 0.0)) throw DomainError("asymptotic_variance: load must be > 0");
  // Exponential part has rate mu/scale; the density at the q-quantile is
  // rate * (1 - q).
  const double scale =
      model == RuntimeModel::PerTask ? load / static_cast<double>(cluster.k) : load;
  const double rate = group.mu / scale;
  const double density = rate * (1.0 - q);
  return q * (1.0 - q) / (static_cast<double>(group.workers) * density * density);
}

}  // namespace coded_alloc
