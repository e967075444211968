// Copyright 2026 The dalmc Authors
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

#ifndef DALMC_SRC_NUMERIC_HPP
#define DALMC_SRC_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace dalmc::num {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

inline double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

// log Phi(a), accurate in both tails.
inline double log_ndtr(double a) {
  if (a > 6.0) return std::log1p(-0.5 * std::erfc(a / std::numbers::sqrt2));
  if (a > -20.0) return std::log(0.5 * std::erfc(-a / std::numbers::sqrt2));
  const double z = 1.0 / (a * a);
  const double series = 1.0 - z * (1.0 - z * (3.0 - z * (15.0 - 105.0 * z)));
  return -0.5 * a * a - std::log(-a) - kLogSqrt2Pi + std::log(series);
}

// log(Phi(a) - Phi(b)) for a > b.
inline double log_diff_ndtr(double a, double b) {
  if (b >= 0.0) return log_diff_ndtr(-b, -a);
  if (a <= 0.0) {
    const double la = log_ndtr(a);
    const double lb = log_ndtr(b);
    return la + std::log(-std::expm1(lb - la));
  }
  // b < 0 < a: both tails are below one half.
  const double tails = 0.5 * std::erfc(a / std::numbers::sqrt2) + 0.5 * std::erfc(-b / std::numbers::sqrt2);
  return std::log1p(-tails);
}

inline double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!(m > -std::numeric_limits<double>::infinity())) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(const std::vector<double>& v) {
  double m = -INFINITY;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace dalmc::num

#endif  // DALMC_SRC_NUMERIC_HPP
