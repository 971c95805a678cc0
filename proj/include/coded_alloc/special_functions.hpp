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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "coded_alloc/errors.hpp"

namespace coded_alloc {

namespace detail {

inline constexpr double kInvE = 1.0 / std::numbers::e;

// Inside this distance of -1/e the derivative of w*e^w vanishes and the
// iteration stalls; the answer there is -1 to double precision anyway.
inline constexpr double kBranchPointWidth = 1e-14;

// Above this argument the near-branch series is a worse start than the
// asymptotic form.
inline constexpr double kSeriesRegimeLimit = -0.25;

inline constexpr int kMaxHalleySteps = 64;

// Halley on f(w) = w*e^w - x. Used near the branch point where the log form
// loses the curvature information.
inline double halley_direct(double x, double w) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < kMaxHalleySteps; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0 || f == 0.0) break;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    double next = w - step;
    if (next > -1.0) next = 0.5 * (w - 1.0);
    const bool done = std::abs(next - w) <= 4.0 * eps * std::abs(next);
    w = next;
    if (done) break;
  }
  return w;
}

// Halley on g(w) = w + log(-w) - log(-x). Same root as w*e^w = x but stays
// well scaled when |x| is tiny.
inline double halley_log(double log_neg_x, double w) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int i = 0; i < kMaxHalleySteps; ++i) {
    const double g = w + std::log(-w) - log_neg_x;
    const double g1 = 1.0 + 1.0 / w;
    const double g2 = -1.0 / (w * w);
    const double step = g / (g1 - 0.5 * g * g2 / g1);
    double next = w - step;
    if (next > -1.0) next = 0.5 * (w - 1.0);
    const bool done = std::abs(next - w) <= 4.0 * eps * std::abs(next);
    w = next;
    if (done) break;
  }
  return w;
}

}  // namespace detail

/// Lower real branch W_{-1} of the Lambert W function.
///
/// Returns the solution w <= -1 of w*e^w = x for x in [-1/e, 0). The start
/// point comes from the square-root series around the branch point when x is
/// close to -1/e and from the asymptotic expansion log(-x) - log(-log(-x))
/// otherwise; Halley iteration then drives the relative residual
/// |w*e^w - x| / |x| to rounding level.
inline double lambert_w_minus1(double x) {
  using detail::kInvE;
  if (!(x < 0.0) || !(x >= -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()))) {
    throw DomainError("lambert_w_minus1: argument " + std::to_string(x) +
                      " outside [-1/e, 0)");
  }
  if (std::abs(x + kInvE) < detail::kBranchPointWidth) return -1.0;

  if (x < detail::kSeriesRegimeLimit) {
    const double p = -std::sqrt(2.0 * std::fma(std::numbers::e, x, 1.0));
    const double w0 = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
    return detail::halley_direct(x, w0);
  }
  const double l1 = std::log(-x);
  const double l2 = std::log(-l1);
  double w0 = l1 - l2 + l2 / l1;
  if (w0 > -1.0) w0 = -1.5;
  return detail::halley_log(l1, w0);
}

/// Above this n the harmonic number switches from direct summation to the
/// asymptotic expansion (truncation error below 1e-30 there).
inline constexpr std::uint64_t kHarmonicSummationLimit = 10'000'000;

/// Harmonic number H_n = sum_{i=1..n} 1/i, with H_0 = 0.
inline double harmonic(std::uint64_t n) {
  if (n <= kHarmonicSummationLimit) {
    double sum = 0.0;
    for (std::uint64_t i = n; i >= 1; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
  }
  const double x = static_cast<double>(n);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + std::numbers::egamma + 0.5 / x -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

/// H_n - H_m for m <= n, summed smallest term first.
inline double harmonic_difference(std::uint64_t n, std::uint64_t m) {
  if (m > n) throw DomainError("harmonic_difference: m > n");
  if (n - m <= kHarmonicSummationLimit) {
    double sum = 0.0;
    for (std::uint64_t i = n; i > m; --i) sum += 1.0 / static_cast<double>(i);
    return sum;
  }
  return harmonic(n) - harmonic(m);
}

}  // namespace coded_alloc
