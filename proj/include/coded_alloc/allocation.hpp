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

// Analytic load allocation for MDS-coded matrix-vector multiplication over
// groups of heterogeneous workers.
//
// All finisher counts r_j and loads l_j are real-valued here. Integer loads
// appear only when an Allocation is built (ceil of the real load).

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coded_alloc/cluster.hpp"
#include "coded_alloc/errors.hpp"
#include "coded_alloc/special_functions.hpp"

namespace coded_alloc {

/// Per-unit-load latency factor alpha + (1/mu) * log(N / (N - r)).
inline double xi(double r, const GroupSpec& group) {
  const auto n = static_cast<double>(group.workers);
  if (!(r > 0.0 && r < n)) {
    throw DomainError("xi: r = " + std::to_string(r) + " outside (0, " +
                      std::to_string(group.workers) + ")");
  }
  return group.alpha - std::log1p(-r / n) / group.mu;
}

enum class Expectation {
  LogApprox,  // H_N - H_{N-r} replaced by log(N / (N - r))
  Exact,      // harmonic-number form
};

/// Expected r-th order statistic of the group's completion times when each
/// worker holds `load` rows.
///
/// The exact form needs an integer r in [1, N]; the log form needs a real r
/// in (0, N).
inline double group_expected_latency(double load, double r, const GroupSpec& group,
                                     std::int64_t k, RuntimeModel model,
                                     Expectation form = Expectation::LogApprox) {
  if (!(load > 0.0)) throw DomainError("group_expected_latency: load must be > 0");
  if (k < 1) throw DomainError("group_expected_latency: k must be >= 1");
  double factor = 0.0;
  if (form == Expectation::Exact) {
    const auto n = group.workers;
    if (!(r >= 1.0 && r <= static_cast<double>(n)) || r != std::floor(r)) {
      throw DomainError("group_expected_latency: exact form needs integer r in [1, N]");
    }
    const auto ri = static_cast<std::int64_t>(r);
    const double gap = harmonic_difference(static_cast<std::uint64_t>(n),
                                           static_cast<std::uint64_t>(n - ri));
    factor = group.alpha + gap / group.mu;
  } else {
    factor = xi(r, group);
  }
  const double scale = model == RuntimeModel::PerTask ? load / static_cast<double>(k) : load;
  return scale * factor;
}

/// W_{-1}(-e^{-(alpha*mu + 1)}) for one group; the quantity every closed
/// form below is built from.
inline double group_lambert(const GroupSpec& group) {
  const double arg = -std::exp(-(group.alpha * group.mu + 1.0));
  if (arg == 0.0) {
    throw UnderflowError("alpha*mu = " + std::to_string(group.alpha * group.mu) +
                         " makes -exp(-(alpha*mu+1)) underflow");
  }
  return lambert_w_minus1(arg);
}

/// Finisher count minimizing the group's term of the latency bound:
/// r* = N (1 + 1/W_{-1}(-e^{-(alpha*mu+1)})).
inline double optimal_r_star(const GroupSpec& group) {
  const double w = group_lambert(group);
  return static_cast<double>(group.workers) * (1.0 + 1.0 / w);
}

/// f(r) = 1 / sum_j r_j / xi(r_j); the latency bound as a function of the
/// finisher counts once loads are equalized. Domain is the open box
/// prod_j (0, N_j).
inline double objective_f(std::span<const double> r, const ClusterSpec& cluster) {
  if (r.size() != cluster.group_count()) {
    throw DomainError("objective_f: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) sum += r[j] / xi(r[j], cluster.groups[j]);
  return 1.0 / sum;
}

/// Minimum of the latency lower bound.
///
/// PerTask: T* = -1 / sum_j mu_j N_j / W_j. PerRow: k times that value.
inline double min_latency_bound(const ClusterSpec& cluster, RuntimeModel model) {
  if (cluster.groups.empty()) throw DomainError("min_latency_bound: no groups");
  double denom = 0.0;
  for (const auto& g : cluster.groups) {
    denom += g.mu * static_cast<double>(g.workers) / group_lambert(g);
  }
  const double per_task = -1.0 / denom;
  return model == RuntimeModel::PerTask ? per_task : static_cast<double>(cluster.k) * per_task;
}

struct OptimalAllocation {
  Allocation allocation;
  OptimalPoint point;
};

/// Load allocation that minimizes the largest per-group expected latency.
///
/// Each group's finisher count sits at its own stationary point r_j*, and the
/// loads are chosen so that l_j * xi(r_j*) is the same in every group while
/// sum_j r_j* l_j = k. The loads coincide for both runtime models; only the
/// bound differs by the factor k.
inline OptimalAllocation optimal_allocation(const ClusterSpec& cluster, RuntimeModel model) {
  if (cluster.groups.empty()) throw DomainError("optimal_allocation: no groups");
  const std::size_t g_count = cluster.group_count();
  OptimalPoint point;
  point.model = model;
  point.r_star.resize(g_count);
  point.q_star.resize(g_count);
  point.xi_star.resize(g_count);

  // Sum of r_j*/xi_j*, which equals -sum_j mu_j N_j / W_j.
  double capacity = 0.0;
  for (std::size_t j = 0; j < g_count; ++j) {
    const auto& g = cluster.groups[j];
    const double w = group_lambert(g);
    const auto n = static_cast<double>(g.workers);
    point.q_star[j] = 1.0 + 1.0 / w;
    point.r_star[j] = n * point.q_star[j];
    point.xi_star[j] = g.alpha + std::log(-w) / g.mu;
    capacity += point.r_star[j] / point.xi_star[j];
  }

  const auto k = static_cast<double>(cluster.k);
  std::vector<double> loads(g_count);
  for (std::size_t j = 0; j < g_count; ++j) loads[j] = k / (point.xi_star[j] * capacity);

  point.t_star = min_latency_bound(cluster, model);
  return {Allocation::from_real_loads(cluster, std::move(loads), Scheme::Optimal),
          std::move(point)};
}

/// Every worker gets n/N rows of an (n, k) code; k*N/n finishers are needed.
inline Allocation uniform_allocation_fixed_n(const ClusterSpec& cluster, std::int64_t n) {
  if (n < cluster.k) {
    throw InvalidRate("uniform allocation needs n >= k (n = " + std::to_string(n) +
                      ", k = " + std::to_string(cluster.k) + ")");
  }
  const auto total = static_cast<double>(cluster.total_workers());
  const double load = static_cast<double>(n) / total;
  auto alloc = Allocation::from_real_loads(
      cluster, std::vector<double>(cluster.group_count(), load), Scheme::UniformFixedN);
  alloc.finisher_count = static_cast<double>(cluster.k) * total / static_cast<double>(n);
  return alloc;
}

struct FixedRAllocation {
  Allocation allocation;
  std::vector<double> finishers;  // r_j per group, summing to r
};

namespace detail {

// Left side of the fixed-r balance equation for group j, as a function of r_j:
// r_j + sum_{j' != j} N_j' (1 - (1 - r_j/N_j)^{mu_j'/mu_j}).
inline double fixed_r_balance(const ClusterSpec& cluster, std::size_t j, double rj) {
  const auto& gj = cluster.groups[j];
  const double nj = static_cast<double>(gj.workers);
  const double log_tail = std::log1p(-rj / nj);
  double total = rj;
  for (std::size_t o = 0; o < cluster.group_count(); ++o) {
    if (o == j) continue;
    const auto& go = cluster.groups[o];
    total += static_cast<double>(go.workers) * -std::expm1(go.mu / gj.mu * log_tail);
  }
  return total;
}

}  // namespace detail

/// Residual of the fixed-r balance equation for group j at r_j.
inline double fixed_r_residual(const ClusterSpec& cluster, std::size_t j, double rj,
                               double r) {
  return detail::fixed_r_balance(cluster, j, rj) - r;
}

/// Fixed-r baseline: every worker holds k/r rows and the master decodes after
/// r finishers, split across groups so each group's expected r_j-th
/// completion time is the same.
///
/// Each r_j solves its balance equation by bisection on (0, N_j (1 - 1e-12)).
/// Requires a common shift parameter.
inline FixedRAllocation fixed_r_allocation(const ClusterSpec& cluster, std::int64_t r) {
  if (cluster.groups.empty()) throw DomainError("fixed_r_allocation: no groups");
  if (r < 1) throw InvalidRate("fixed_r_allocation: r must be >= 1");
  const double alpha0 = cluster.groups.front().alpha;
  for (const auto& g : cluster.groups) {
    if (std::abs(g.alpha - alpha0) > 1e-12 * std::abs(alpha0)) {
      throw ShiftMismatch("fixed-r scheme needs equal alpha in every group");
    }
  }
  constexpr double kEdge = 1e-12;
  constexpr int kMaxBisections = 200;
  const auto target = static_cast<double>(r);

  std::vector<double> finishers(cluster.group_count());
  for (std::size_t j = 0; j < cluster.group_count(); ++j) {
    const double nj = static_cast<double>(cluster.groups[j].workers);
    double lo = 0.0;
    double hi = nj * (1.0 - kEdge);
    const double top = detail::fixed_r_balance(cluster, j, hi);
    if (top < target) {
      throw NoSolution("fixed-r balance equation for group " + std::to_string(j) +
                           " reaches at most " + std::to_string(top) + " < r = " +
                           std::to_string(r),
                       0.0, top);
    }
    for (int it = 0; it < kMaxBisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (detail::fixed_r_balance(cluster, j, mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    finishers[j] = 0.5 * (lo + hi);
  }

  const double load = static_cast<double>(cluster.k) / target;
  auto alloc = Allocation::from_real_loads(
      cluster, std::vector<double>(cluster.group_count(), load), Scheme::FixedR);
  alloc.finisher_count = target;
  return {std::move(alloc), std::move(finishers)};
}

/// Closed-form allocation from the max-aggregation formulation under the
/// per-row model: delta_j = -(W_j + 1)/mu_j,
/// s = sum_j N_j mu_j / (1 + mu_j delta_j), l_j = k / (s delta_j).
inline Allocation reisizadeh_allocation(const ClusterSpec& cluster) {
  if (cluster.groups.empty()) throw DomainError("reisizadeh_allocation: no groups");
  const std::size_t g_count = cluster.group_count();
  std::vector<double> delta(g_count);
  double s = 0.0;
  for (std::size_t j = 0; j < g_count; ++j) {
    const auto& g = cluster.groups[j];
    delta[j] = -(group_lambert(g) + 1.0) / g.mu;
    s += static_cast<double>(g.workers) * g.mu / (1.0 + g.mu * delta[j]);
  }
  const auto k = static_cast<double>(cluster.k);
  std::vector<double> loads(g_count);
  for (std::size_t j = 0; j < g_count; ++j) loads[j] = k / (s * delta[j]);
  return Allocation::from_real_loads(cluster, std::move(loads), Scheme::ReisizadehStyle);
}

}  // namespace coded_alloc
