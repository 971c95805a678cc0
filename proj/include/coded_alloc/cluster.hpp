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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coded_alloc/errors.hpp"

namespace coded_alloc {

/// Per-worker completion-time law.
///
/// PerTask: shifted exponential with shift alpha*l/k and rate k*mu/l, so mu
/// and alpha describe a worker that processes all k rows.
/// PerRow: shift alpha*l and rate mu/l, so mu and alpha describe one row.
enum class RuntimeModel { PerTask, PerRow };

enum class Scheme { Optimal, UniformFixedN, FixedR, ReisizadehStyle, Custom };

inline std::string_view to_string(RuntimeModel model) {
  return model == RuntimeModel::PerTask ? "per-task" : "per-row";
}

inline RuntimeModel parse_runtime_model(std::string_view text) {
  if (text == "per-task") return RuntimeModel::PerTask;
  if (text == "per-row") return RuntimeModel::PerRow;
  throw ConfigError("unknown runtime model '" + std::string(text) +
                    "' (expected per-task or per-row)");
}

inline std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Optimal: return "optimal";
    case Scheme::UniformFixedN: return "uniform";
    case Scheme::FixedR: return "fixed-r";
    case Scheme::ReisizadehStyle: return "reisizadeh";
    case Scheme::Custom: return "custom";
  }
  return "custom";
}

/// One group of identical workers.
struct GroupSpec {
  std::int64_t workers = 1;
  double mu = 1.0;     // straggling rate
  double alpha = 1.0;  // shift

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// Ordered groups plus the row count k of the uncoded matrix.
struct ClusterSpec {
  std::vector<GroupSpec> groups;
  std::int64_t k = 1;

  std::size_t group_count() const noexcept { return groups.size(); }

  std::int64_t total_workers() const noexcept {
    std::int64_t total = 0;
    for (const auto& g : groups) total += g.workers;
    return total;
  }

  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

/// Straggling rates at or above this value are outside the range where the
/// model was evaluated; W_{-1}(-e^{-(alpha*mu+1)}) heads to underflow.
inline constexpr double kRateValidityThreshold = 750.0;

/// Below this alpha*mu the Lambert argument rounds onto the branch point and
/// the optimal finisher count collapses to zero.
inline constexpr double kMinViableShiftRate = 1e-10;

enum class ViolationCode {
  NoGroups,
  NonPositiveRowCount,
  NonPositiveWorkers,
  NonPositiveRate,
  NonPositiveShift,
  NonFiniteParameter,
  RateBelowNumericalViability,
  RateAboveModelValidityThreshold,
};

enum class Severity { Error, Warning };

inline std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::NoGroups: return "NoGroups";
    case ViolationCode::NonPositiveRowCount: return "NonPositiveRowCount";
    case ViolationCode::NonPositiveWorkers: return "NonPositiveWorkers";
    case ViolationCode::NonPositiveRate: return "NonPositiveRate";
    case ViolationCode::NonPositiveShift: return "NonPositiveShift";
    case ViolationCode::NonFiniteParameter: return "NonFiniteParameter";
    case ViolationCode::RateBelowNumericalViability: return "RateBelowNumericalViability";
    case ViolationCode::RateAboveModelValidityThreshold:
      return "RateAboveModelValidityThreshold";
  }
  return "Unknown";
}

struct Violation {
  ViolationCode code;
  Severity severity = Severity::Error;
  std::optional<std::size_t> group;  // index into ClusterSpec::groups
  std::string message;
};

/// Every invariant violation of the cluster, errors and warnings alike.
/// An empty result means the cluster is valid.
inline std::vector<Violation> validate_cluster(const ClusterSpec& spec) {
  std::vector<Violation> out;
  if (spec.groups.empty()) {
    out.push_back({ViolationCode::NoGroups, Severity::Error, std::nullopt,
                   "cluster has no groups"});
  }
  if (spec.k < 1) {
    out.push_back({ViolationCode::NonPositiveRowCount, Severity::Error, std::nullopt,
                   "k must be >= 1, got " + std::to_string(spec.k)});
  }
  for (std::size_t j = 0; j < spec.groups.size(); ++j) {
    const auto& g = spec.groups[j];
    const std::string where = "group " + std::to_string(j) + ": ";
    if (g.workers < 1) {
      out.push_back({ViolationCode::NonPositiveWorkers, Severity::Error, j,
                     where + "workers must be >= 1"});
    }
    if (!std::isfinite(g.mu) || !std::isfinite(g.alpha)) {
      out.push_back({ViolationCode::NonFiniteParameter, Severity::Error, j,
                     where + "mu and alpha must be finite"});
      continue;
    }
    if (g.mu <= 0.0) {
      out.push_back({ViolationCode::NonPositiveRate, Severity::Error, j,
                     where + "mu must be > 0"});
    }
    if (g.alpha <= 0.0) {
      out.push_back({ViolationCode::NonPositiveShift, Severity::Error, j,
                     where + "alpha must be > 0"});
    }
    if (g.mu > 0.0 && g.alpha > 0.0 && g.alpha * g.mu < kMinViableShiftRate) {
      out.push_back({ViolationCode::RateBelowNumericalViability, Severity::Error, j,
                     where + "alpha*mu below " + std::to_string(kMinViableShiftRate)});
    }
    if (g.mu >= kRateValidityThreshold) {
      out.push_back({ViolationCode::RateAboveModelValidityThreshold, Severity::Warning, j,
                     where + "mu >= 750 is outside the validated model range"});
    }
  }
  return out;
}

inline bool has_errors(std::span<const Violation> violations) {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.severity == Severity::Error; });
}

/// Per-group rows per worker, real-valued and ceil-rounded.
struct Allocation {
  std::vector<double> loads_real;
  std::vector<std::int64_t> loads_int;
  double n_real = 0.0;
  std::int64_t n_int = 0;
  Scheme scheme = Scheme::Custom;
  // Total finisher count implied by the scheme, when it fixes one (uniform
  // and fixed-r schemes).
  std::optional<double> finisher_count;

  /// Builds the allocation from real loads; integer loads are the ceil.
  static Allocation from_real_loads(const ClusterSpec& cluster, std::vector<double> loads,
                                    Scheme scheme) {
    if (loads.size() != cluster.group_count()) {
      throw DomainError("allocation has " + std::to_string(loads.size()) +
                        " loads for " + std::to_string(cluster.group_count()) + " groups");
    }
    Allocation a;
    a.scheme = scheme;
    a.loads_int.reserve(loads.size());
    for (std::size_t j = 0; j < loads.size(); ++j) {
      if (!(loads[j] > 0.0) || !std::isfinite(loads[j])) {
        throw DomainError("load of group " + std::to_string(j) + " must be positive");
      }
      const auto workers = static_cast<double>(cluster.groups[j].workers);
      const auto rounded = static_cast<std::int64_t>(std::ceil(loads[j]));
      a.n_real += workers * loads[j];
      a.n_int += cluster.groups[j].workers * rounded;
      a.loads_int.push_back(rounded);
    }
    a.loads_real = std::move(loads);
    return a;
  }

  /// Code rate k/n of the real-valued allocation.
  double rate(const ClusterSpec& cluster) const {
    return static_cast<double>(cluster.k) / n_real;
  }
};

/// Stationary point of the latency lower bound and its value.
struct OptimalPoint {
  std::vector<double> r_star;   // optimal finisher count per group, in (0, N_j)
  std::vector<double> q_star;   // r_star / N_j
  std::vector<double> xi_star;  // per-unit-load latency factor at r_star
  double t_star = 0.0;          // latency lower bound
  RuntimeModel model = RuntimeModel::PerTask;
};

struct LatencyEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

}  // namespace coded_alloc
