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


#include "coded_alloc/latency_mc.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "coded_alloc/allocation.hpp"
#include "coded_alloc/verification.hpp"

namespace coded_alloc {
namespace {

SimulationOptions opts(std::size_t trials, std::uint64_t seed, unsigned threads = 1,
                       LoadKind loads = LoadKind::Integer) {
  return {trials, seed, loads, threads};
}

TEST(CounterRng, OpenUnitIntervalAndPure) {
  const CounterRng a(42);
  const CounterRng b(42);
  const CounterRng c(43);
  int differ = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    for (std::uint64_t w = 0; w < 100; ++w) {
      const double u = a.uniform(t, w);
      ASSERT_GT(u, 0.0);
      ASSERT_LT(u, 1.0);
      ASSERT_EQ(u, b.uniform(t, w));
      differ += u != c.uniform(t, w);
    }
  }
  EXPECT_EQ(differ, 10'000);
}

TEST(CounterRng, RoughlyUniform) {
  const CounterRng rng(5);
  std::vector<int> bins(10, 0);
  for (std::uint64_t t = 0; t < 1000; ++t) {
    for (std::uint64_t w = 0; w < 100; ++w) ++bins[static_cast<std::size_t>(rng.uniform(t, w) * 10)];
  }
  // 10^4 expected per bin; 6 sigma is 570.
  for (int b : bins) EXPECT_NEAR(b, 10'000, 570);
}

TEST(SampleWorkerTime, ShiftAtZero) {
  const GroupSpec g{1, 2.0, 1.5};
  EXPECT_DOUBLE_EQ(sample_worker_time(g, 40.0, 100, RuntimeModel::PerTask, 0x1.0p-60),
                   0.4 * 1.5);
  EXPECT_NEAR(sample_worker_time(g, 40.0, 100, RuntimeModel::PerRow, 0x1.0p-60), 60.0, 1e-12);
  EXPECT_EQ(sample_worker_time(g, 40.0, 100, RuntimeModel::PerTask, 0.0), 0.4 * 1.5);
}

TEST(SampleWorkerTime, OneMeanPastShift) {
  const GroupSpec g{1, 1.0, 1.0};
  EXPECT_NEAR(sample_worker_time(g, 100.0, 100, RuntimeModel::PerTask, 1.0 - std::exp(-1.0)),
              2.0, 1e-15);
}

TEST(SampleWorkerTime, EmpiricalCdfWithinDkwBand) {
  const GroupSpec g{1, 3.0, 0.5};
  const double load = 20.0;
  const std::int64_t k = 100;
  const CounterRng rng(99);
  constexpr std::size_t kSamples = 100'000;
  std::vector<double> t(kSamples);
  for (std::size_t i = 0; i < kSamples; ++i) {
    t[i] = sample_worker_time(g, load, k, RuntimeModel::PerTask, rng.uniform(i, 0));
  }
  std::sort(t.begin(), t.end());
  // DKW: P(sup |F_n - F| > eps) <= 2 exp(-2 n eps^2); eps for failure 1e-6.
  const double eps = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * kSamples));
  const double shift = g.alpha * load / static_cast<double>(k);
  const double rate = static_cast<double>(k) * g.mu / load;
  for (int d = 1; d <= 9; ++d) {
    const double p = d / 10.0;
    const double x = shift - std::log1p(-p) / rate;
    const double empirical =
        static_cast<double>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) / kSamples;
    EXPECT_NEAR(empirical, p, eps) << "quantile " << p;
  }
  EXPECT_GE(t.front(), shift);
}

TEST(SimulateLatency, SingleWorker) {
  const ClusterSpec c{{{1, 2.0, 1.0}}, 100};
  const auto a = Allocation::from_real_loads(c, {100.0}, Scheme::Custom);
  const auto est = simulate_latency(c, a, RuntimeModel::PerTask, opts(20'000, 3));
  EXPECT_NEAR(est.mean, 1.5, 3.0 * est.std_error);
  EXPECT_EQ(est.trials, 20'000u);
  EXPECT_EQ(est.seed, 3u);
}

TEST(SimulateLatency, HomogeneousMatchesHarmonicForm) {
  // k = 500 rows, one row per worker: the 500th of 1000 finishers decides.
  const ClusterSpec c{{{1000, 1.0, 1.0}}, 500};
  const auto a = Allocation::from_real_loads(c, {1.0}, Scheme::Custom);
  const double exact = oracle::exact_order_statistic_mean(1000, 500, 1.0, 1.0, 1.0, 500,
                                                          RuntimeModel::PerTask);
  EXPECT_NEAR(exact, 1.6926474305598203 / 500.0, 1e-15);
  const auto est = simulate_latency(c, a, RuntimeModel::PerTask, opts(10'000, 1));
  EXPECT_NEAR(est.mean, exact, 3.0 * est.std_error);
  const auto outcomes = simulate_outcomes(c, a, RuntimeModel::PerTask, opts(50, 1));
  for (const auto& o : outcomes) EXPECT_EQ(o.finishers_per_group[0], 500);
}

TEST(SimulateLatency, PerRowHomogeneousMatchesHarmonicForm) {
  const ClusterSpec c{{{200, 0.5, 2.0}}, 50};
  const auto a = Allocation::from_real_loads(c, {0.5}, Scheme::Custom);
  const double exact =
      oracle::exact_order_statistic_mean(200, 100, 0.5, 2.0, 0.5, 50, RuntimeModel::PerRow);
  const auto est = simulate_latency(c, a, RuntimeModel::PerRow,
                                    opts(10'000, 8, 1, LoadKind::Real));
  EXPECT_NEAR(est.mean, exact, 3.0 * est.std_error);
}

TEST(SimulateLatency, IndependentOfThreadCount) {
  const ClusterSpec c{{{300, 4.0, 1.0}, {600, 0.5, 1.0}}, 10'000};
  const auto opt = optimal_allocation(c, RuntimeModel::PerTask);
  const auto one = simulate_outcomes(c, opt.allocation, RuntimeModel::PerTask, opts(1000, 77, 1));
  const auto four = simulate_outcomes(c, opt.allocation, RuntimeModel::PerTask, opts(1000, 77, 4));
  const auto seven = simulate_outcomes(c, opt.allocation, RuntimeModel::PerTask, opts(1000, 77, 7));
  EXPECT_EQ(one, four);
  EXPECT_EQ(one, seven);
  const auto e1 = simulate_latency(c, opt.allocation, RuntimeModel::PerTask, opts(1000, 77, 1));
  const auto e4 = simulate_latency(c, opt.allocation, RuntimeModel::PerTask, opts(1000, 77, 4));
  EXPECT_EQ(e1.mean, e4.mean);
  EXPECT_EQ(e1.std_error, e4.std_error);
  const auto other = simulate_latency(c, opt.allocation, RuntimeModel::PerTask, opts(1000, 78, 1));
  EXPECT_NE(other.mean, e1.mean);
}

TEST(SimulateLatency, CompletionIsMinimalPrefix) {
  const ClusterSpec c{{{30, 16.0, 1.0}, {40, 4.0, 1.0}, {50, 1.0, 1.0}}, 1000};
  const auto opt = optimal_allocation(c, RuntimeModel::PerTask);
  const auto& loads = opt.allocation.loads_int;
  const std::uint64_t seed = 12;
  const auto outcomes = simulate_outcomes(c, opt.allocation, RuntimeModel::PerTask,
                                          opts(300, seed, 2));
  const CounterRng rng(seed);
  for (std::uint64_t t = 0; t < outcomes.size(); ++t) {
    struct W {
      double time;
      std::size_t group;
      std::size_t index;
    };
    std::vector<W> all;
    std::size_t index = 0;
    for (std::size_t j = 0; j < c.group_count(); ++j) {
      for (std::int64_t i = 0; i < c.groups[j].workers; ++i, ++index) {
        all.push_back({sample_worker_time(c.groups[j], static_cast<double>(loads[j]), c.k,
                                          RuntimeModel::PerTask, rng.uniform(t, index)),
                       j, index});
      }
    }
    std::sort(all.begin(), all.end(), [](const W& a, const W& b) {
      return a.time < b.time || (a.time == b.time && a.index < b.index);
    });
    std::vector<std::int64_t> count(c.group_count(), 0);
    std::int64_t rows = 0;
    std::size_t i = 0;
    for (; rows < c.k; ++i) {
      rows += loads[all[i].group];
      ++count[all[i].group];
    }
    ASSERT_EQ(outcomes[t].completion_time, all[i - 1].time) << "trial " << t;
    ASSERT_EQ(outcomes[t].finishers_per_group, count) << "trial " << t;
    ASSERT_LT(rows - loads[all[i - 1].group], c.k);
  }
}

TEST(SimulateLatency, OptimalMeanAboveLowerBound) {
  const std::vector<ClusterSpec> clusters{
      {{{1000, 1.0, 1.0}}, 100'000},
      {{{300, 4.0, 1.0}, {600, 0.5, 1.0}}, 100'000},
      {{{100, 16.0, 1.0}, {200, 8.0, 1.0}, {300, 1.0, 2.0}}, 100'000},
  };
  for (const auto& c : clusters) {
    for (auto model : {RuntimeModel::PerTask, RuntimeModel::PerRow}) {
      const auto opt = optimal_allocation(c, model);
      const auto est = simulate_latency(c, opt.allocation, model,
                                        opts(2000, 4, 0, LoadKind::Real));
      EXPECT_GE(est.mean, opt.point.t_star - 3.0 * est.std_error);
    }
  }
}

TEST(SimulateLatency, StandardErrorShrinksWithTrials) {
  const ClusterSpec c{{{100, 1.0, 1.0}}, 1000};
  const auto a = uniform_allocation_fixed_n(c, 2000);
  const auto small = simulate_latency(c, a, RuntimeModel::PerTask, opts(1000, 2));
  const auto large = simulate_latency(c, a, RuntimeModel::PerTask, opts(16'000, 2));
  EXPECT_NEAR(small.std_error / large.std_error, 4.0, 0.6);
}

TEST(SimulateLatency, InfeasibleAllocation) {
  const ClusterSpec c{{{10, 1.0, 1.0}}, 1000};
  const auto a = Allocation::from_real_loads(c, {50.0}, Scheme::Custom);
  EXPECT_THROW(simulate_latency(c, a, RuntimeModel::PerTask, opts(10, 1)), Infeasible);
  EXPECT_THROW(simulate_outcomes(c, a, RuntimeModel::PerTask, opts(10, 1)), Infeasible);
  const auto ok = Allocation::from_real_loads(c, {100.0}, Scheme::Custom);
  EXPECT_THROW(simulate_latency(c, ok, RuntimeModel::PerTask, opts(0, 1)), DomainError);
}

TEST(AsymptoticVariance, FixedLoadScalesInversely) {
  const ClusterSpec c{{{1000, 1.0, 1.0}}, 10'000};
  ClusterSpec doubled = c;
  doubled.groups[0].workers = 2000;
  const double a = asymptotic_variance(c.groups[0], 14.0, 0.6, c);
  const double b = asymptotic_variance(doubled.groups[0], 14.0, 0.6, doubled);
  EXPECT_NEAR(b / a, 0.5, 1e-12);
}

TEST(AsymptoticVariance, OptimalPointScalesAsInverseCube) {
  // The optimal load itself halves when every N_j doubles, and the density
  // scales as 1/load, so the variance drops by 8.
  const ClusterSpec c{{{300, 4.0, 1.0}, {600, 0.5, 1.0}}, 100'000};
  ClusterSpec doubled = c;
  for (auto& g : doubled.groups) g.workers *= 2;
  const auto a = optimal_allocation(c, RuntimeModel::PerTask);
  const auto b = optimal_allocation(doubled, RuntimeModel::PerTask);
  for (std::size_t j = 0; j < 2; ++j) {
    const double va =
        asymptotic_variance(c.groups[j], a.allocation.loads_real[j], a.point.q_star[j], c);
    const double vb = asymptotic_variance(doubled.groups[j], b.allocation.loads_real[j],
                                          b.point.q_star[j], doubled);
    EXPECT_NEAR(vb / va, 0.125, 1e-9);
  }
}

TEST(AsymptoticVariance, MatchesEmpiricalOrderStatistic) {
  const ClusterSpec c{{{1000, 1.0, 1.0}}, 10'000};
  const auto opt = optimal_allocation(c, RuntimeModel::PerTask);
  const double load = opt.allocation.loads_real[0];
  const double q = opt.point.q_star[0];
  const auto rank = static_cast<std::size_t>(std::ceil(q * 1000.0));
  const double predicted = asymptotic_variance(c.groups[0], load, q, c);

  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> stats;
  std::vector<double> t(1000);
  for (int trial = 0; trial < 10'000; ++trial) {
    for (auto& x : t) {
      x = (load / 1e4) * (1.0 - std::log1p(-unif(gen)));
    }
    std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(rank - 1), t.end());
    stats.push_back(t[rank - 1]);
  }
  const double mean = std::accumulate(stats.begin(), stats.end(), 0.0) / stats.size();
  double ss = 0.0;
  for (double s : stats) ss += (s - mean) * (s - mean);
  const double empirical = ss / (stats.size() - 1.0);
  EXPECT_NEAR(empirical / predicted, 1.0, 0.10);
}

TEST(AsymptoticVariance, EndpointsAndErrors) {
  const ClusterSpec c{{{1000, 1.0, 1.0}}, 10'000};
  const auto& g = c.groups[0];
  EXPECT_LT(asymptotic_variance(g, 10.0, 1e-9, c), 1e-8 * asymptotic_variance(g, 10.0, 0.5, c));
  EXPECT_GT(asymptotic_variance(g, 10.0, 1.0 - 1e-9, c), 1e6 * asymptotic_variance(g, 10.0, 0.5, c));
  EXPECT_THROW(asymptotic_variance(g, 10.0, 0.0, c), DomainError);
  EXPECT_THROW(asymptotic_variance(g, 10.0, 1.0, c), DomainError);
  EXPECT_THROW(asymptotic_variance(g, 0.0, 0.5, c), DomainError);
}

}  // namespace
}  // namespace coded_alloc
