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

// Brute-force oracles for the analytic allocation code. Nothing in this file
// calls the routine it is checking; each oracle recomputes its quantity from
// the defining equation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "coded_alloc/allocation.hpp"
#include "coded_alloc/cluster.hpp"
#include "coded_alloc/errors.hpp"
#include "coded_alloc/latency_mc.hpp"
#include "coded_alloc/special_functions.hpp"

namespace coded_alloc::oracle {

struct OracleReport {
  std::string name;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::size_t samples = 0;
  double tolerance = 0.0;
  bool pass = false;
};

inline OracleReport make_report(std::string name, double max_abs, double max_rel,
                                std::size_t samples, double tolerance) {
  return {std::move(name), max_abs, max_rel, samples, tolerance, max_rel <= tolerance};
}

/// W_{-1}(x) by bisection of w*e^w = x, starting from [-60, -1] and pushing the
/// lower end out until it brackets the root.
inline double lambert_bisection_oracle(double x) {
  const double inv_e = std::exp(-1.0);
  if (!(x < 0.0) || x < -inv_e * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    throw DomainError("lambert_bisection_oracle: argument outside [-1/e, 0)");
  }
  // w*e^w - x is <= 0 at w = -1 and positive for w far enough below.
  auto f = [x](double w) { return w * std::exp(w) - x; };
  double hi = -1.0;
  if (f(hi) >= 0.0) return -1.0;
  double lo = -60.0;
  while (f(lo) <= 0.0) lo *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Expected r-th order statistic of N i.i.d. shifted exponentials, exact:
/// scale * (alpha + (H_N - H_{N-r}) / mu).
inline double exact_order_statistic_mean(std::int64_t workers, std::int64_t r, double mu,
                                         double alpha, double load, std::int64_t k,
                                         RuntimeModel model) {
  if (workers < 1 || r < 1 || r > workers) {
    throw DomainError("exact_order_statistic_mean: need 1 <= r <= N");
  }
  if (!(mu > 0.0) || !(load > 0.0) || k < 1) {
    throw DomainError("exact_order_statistic_mean: mu, load, k must be positive");
  }
  // Kahan sum of 1/i over (N - r, N], smallest terms first.
  double sum = 0.0;
  double comp = 0.0;
  for (std::int64_t i = workers; i > workers - r; --i) {
    const double y = 1.0 / static_cast<double>(i) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double scale = model == RuntimeModel::PerTask ? load / static_cast<double>(k) : load;
  return scale * (alpha + sum / mu);
}

struct GridMinimum {
  std::vector<double> argmin;
  double value = 0.0;
  std::vector<double> cell_width;  // N_j / points_per_axis
};

inline constexpr std::uint64_t kDefaultGridCap = 20'000'000;

/// Exhaustive scan of f(r) = 1 / sum_j r_j / xi_j(r_j) over a cell-centred grid
/// of the open box prod_j (0, N_j).
inline GridMinimum grid_minimize_f(const ClusterSpec& cluster, std::size_t points_per_axis,
                                   std::uint64_t max_evaluations = kDefaultGridCap) {
  const std::size_t dims = cluster.group_count();
  if (dims == 0) throw DomainError("grid_minimize_f: no groups");
  if (points_per_axis < 10) throw DomainError("grid_minimize_f: need >= 10 points per axis");
  double total = 1.0;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<double>(points_per_axis);
  if (dims > 3 || total > static_cast<double>(max_evaluations)) {
    throw ComplexityGuard("grid of " + std::to_string(points_per_axis) + "^" +
                          std::to_string(dims) + " points exceeds the evaluation cap");
  }

  // Each term r/xi depends on one axis only; tabulate them once per axis.
  std::vector<std::vector<double>> coord(dims), term(dims);
  GridMinimum out;
  out.cell_width.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& g = cluster.groups[d];
    const double n = static_cast<double>(g.workers);
    out.cell_width[d] = n / static_cast<double>(points_per_axis);
    coord[d].resize(points_per_axis);
    term[d].resize(points_per_axis);
    for (std::size_t i = 0; i < points_per_axis; ++i) {
      const double r = (static_cast<double>(i) + 0.5) * out.cell_width[d];
      coord[d][i] = r;
      term[d][i] = r / (g.alpha + std::log(n / (n - r)) / g.mu);
    }
  }

  std::vector<std::size_t> idx(dims, 0);
  std::vector<std::size_t> best(dims, 0);
  double best_value = std::numeric_limits<double>::infinity();
  while (true) {
    double sum = 0.0;
    for (std::size_t d = 0; d < dims; ++d) sum += term[d][idx[d]];
    const double value = 1.0 / sum;
    if (value < best_value) {
      best_value = value;
      best = idx;
    }
    std::size_t d = 0;
    while (d < dims && ++idx[d] == points_per_axis) idx[d++] = 0;
    if (d == dims) break;
  }
  out.value = best_value;
  out.argmin.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) out.argmin[d] = coord[d][best[d]];
  return out;
}

/// Largest pairwise gap of l_j * xi_j(r_j*) relative to the first group's
/// value. xi is recomputed from the stored r_star.
inline double equalization_residual(const Allocation& alloc, const OptimalPoint& point,
                                    const ClusterSpec& cluster) {
  const std::size_t dims = cluster.group_count();
  if (alloc.loads_real.size() != dims || point.r_star.size() != dims) {
    throw DomainError("equalization_residual: dimension mismatch");
  }
  std::vector<double> level(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    const auto& g = cluster.groups[j];
    const double n = static_cast<double>(g.workers);
    const double x = g.alpha + std::log(n / (n - point.r_star[j])) / g.mu;
    level[j] = alloc.loads_real[j] * x;
  }
  const auto [lo, hi] = std::minmax_element(level.begin(), level.end());
  return (*hi - *lo) / level.front();
}

struct VerifyOptions {
  std::size_t lambert_points = 10'000;
  std::size_t grid_points = 0;  // 0: chosen from G
  std::size_t trials = 2'000;
  std::uint64_t seed = 1;
  RuntimeModel model = RuntimeModel::PerTask;
};

/// Log-spaced arguments in (-1/e, 0): |x| from 1e-300 up to just below 1/e.
inline std::vector<double> lambert_sample_points(std::size_t count) {
  std::vector<double> xs(count);
  const double lo = std::log(1e-300);
  const double hi = -1.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count);
    xs[i] = -std::exp(lo + (hi - lo) * t);
  }
  return xs;
}

inline OracleReport lambert_round_trip_report(std::size_t count) {
  double max_abs = 0.0;
  double max_rel = 0.0;
  for (double x : lambert_sample_points(count)) {
    const double w = lambert_w_minus1(x);
    const double err = std::abs(w * std::exp(w) - x);
    max_abs = std::max(max_abs, err);
    max_rel = std::max(max_rel, w <= -1.0 ? err / std::abs(x) : 1.0);
  }
  return make_report("lambert_round_trip", max_abs, max_rel, count, 1e-12);
}

inline OracleReport lambert_bisection_report(std::size_t count) {
  double max_abs = 0.0;
  double max_rel = 0.0;
  for (double x : lambert_sample_points(count)) {
    const double w = lambert_w_minus1(x);
    const double ref = lambert_bisection_oracle(x);
    max_abs = std::max(max_abs, std::abs(w - ref));
    max_rel = std::max(max_rel, std::abs(w - ref) / std::abs(ref));
  }
  return make_report("lambert_vs_bisection", max_abs, max_rel, count, 1e-10);
}

/// Grid minimum against the closed-form bound and argmin against r*. The
/// relative error reported is the larger of the value gap and the argmin
/// distance in cell widths minus one (so anything within one cell counts 0).
inline OracleReport grid_report(const ClusterSpec& cluster, std::size_t points_per_axis) {
  const auto grid = grid_minimize_f(cluster, points_per_axis);
  const double bound = min_latency_bound(cluster, RuntimeModel::PerTask);
  double cells = 0.0;
  for (std::size_t j = 0; j < cluster.group_count(); ++j) {
    const double r_star = optimal_r_star(cluster.groups[j]);
    cells = std::max(cells, std::abs(grid.argmin[j] - r_star) / grid.cell_width[j]);
  }
  const double value_gap = (grid.value - bound) / bound;
  // The grid can never beat the true minimum.
  const double below = value_gap < -1e-12 ? 1.0 : 0.0;
  // Tolerance on the value: second-order in the cell width.
  double curvature_budget = 0.0;
  for (std::size_t j = 0; j < cluster.group_count(); ++j) {
    const double h = grid.cell_width[j] / static_cast<double>(cluster.groups[j].workers);
    curvature_budget += h * h;
  }
  const double tol = std::max(1e-9, 10.0 * curvature_budget);
  const double err = std::max({below, std::max(0.0, cells - 1.0), std::max(0.0, value_gap)});
  auto report = make_report("grid_vs_closed_form", std::abs(grid.value - bound), err,
                            static_cast<std::size_t>(std::pow(points_per_axis,
                                                              cluster.group_count())),
                            tol);
  return report;
}

/// Runs every oracle that applies to the cluster.
inline std::vector<OracleReport> run_oracles(const ClusterSpec& cluster,
                                             const VerifyOptions& options = {}) {
  std::vector<OracleReport> reports;
  reports.push_back(lambert_round_trip_report(options.lambert_points));
  reports.push_back(lambert_bisection_report(options.lambert_points));

  const auto opt = optimal_allocation(cluster, options.model);
  const std::size_t dims = cluster.group_count();

  // Independent minimizer of each group term via the stationarity equation
  // r/(mu (N-r)) = xi(r), solved by bisection.
  {
    double max_abs = 0.0;
    double max_rel = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const auto& g = cluster.groups[j];
      const double n = static_cast<double>(g.workers);
      auto h = [&](double r) {
        return r / (g.mu * (n - r)) - (g.alpha + std::log(n / (n - r)) / g.mu);
      };
      double lo = 0.0;
      double hi = n;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (h(mid) < 0.0 ? lo : hi) = mid;
      }
      const double ref = 0.5 * (lo + hi);
      max_abs = std::max(max_abs, std::abs(opt.point.r_star[j] - ref));
      max_rel = std::max(max_rel, std::abs(opt.point.r_star[j] - ref) / ref);
    }
    reports.push_back(make_report("r_star_vs_stationarity_bisection", max_abs, max_rel, dims,
                                  1e-9));
  }

  if (dims <= 3) {
    std::size_t points = options.grid_points;
    if (points == 0) points = dims == 1 ? 100'000 : dims == 2 ? 2'000 : 200;
    reports.push_back(grid_report(cluster, points));
  }

  {
    const double res = equalization_residual(opt.allocation, opt.point, cluster);
    reports.push_back(make_report("equalization", res, res, dims, 1e-9));
  }

  {
    double budget = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      budget += opt.point.r_star[j] * opt.allocation.loads_real[j];
    }
    const double k = static_cast<double>(cluster.k);
    reports.push_back(
        make_report("recovery_budget", std::abs(budget - k), std::abs(budget - k) / k, dims,
                    1e-9));
  }

  // Log-for-harmonic approximation at each optimum, using the nearest integer
  // finisher count. The tolerance is the analytic bound
  // |H_N - H_{N-r} - log(N/(N-r))| <= 1/(2(N-r)) + 1/(12(N-r)^2), divided by mu
  // and taken relative to the exact value.
  {
    double max_abs = 0.0;
    double max_rel = 0.0;
    double tol = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const auto& g = cluster.groups[j];
      auto r = static_cast<std::int64_t>(std::llround(opt.point.r_star[j]));
      r = std::clamp<std::int64_t>(r, 1, std::max<std::int64_t>(1, g.workers - 1));
      if (r >= g.workers) continue;
      const double exact = exact_order_statistic_mean(g.workers, r, g.mu, g.alpha, 1.0,
                                                      cluster.k, RuntimeModel::PerRow);
      const double n = static_cast<double>(g.workers);
      const double rest = n - static_cast<double>(r);
      const double approx = g.alpha + std::log(n / rest) / g.mu;
      const double bound = (0.5 / rest + 1.0 / (12.0 * rest * rest)) / g.mu;
      max_abs = std::max(max_abs, std::abs(exact - approx));
      max_rel = std::max(max_rel, std::abs(exact - approx) / exact);
      tol = std::max(tol, bound / exact);
    }
    reports.push_back(make_report("log_vs_harmonic_expectation", max_abs, max_rel, dims, tol));
  }

  // The bound must sit below the simulated latency of its own allocation.
  if (options.trials > 0) {
    SimulationOptions sim;
    sim.trials = options.trials;
    sim.seed = options.seed;
    sim.loads = LoadKind::Real;
    const auto est = simulate_latency(cluster, opt.allocation, options.model, sim);
    const double floor = opt.point.t_star - 3.0 * est.std_error;
    const double shortfall = std::max(0.0, floor - est.mean);
    reports.push_back(make_report("mc_above_lower_bound", shortfall,
                                  shortfall / opt.point.t_star, options.trials, 0.0));
  }
  return reports;
}

}  // namespace coded_alloc::oracle
