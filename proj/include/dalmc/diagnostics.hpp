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

#ifndef DALMC_DIAGNOSTICS_HPP
#define DALMC_DIAGNOSTICS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dalmc/common.hpp"
#include "dalmc/paths.hpp"
#include "dalmc/targets.hpp"

namespace dalmc {

struct MetricReport {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  std::vector<std::size_t> sample_sizes;
  std::string method;
};

// sqrt(mean (a_(i) - b_(i))^2) over sorted copies.
double w2_1d(std::vector<double> a, std::vector<double> b);
// Mean of per-coordinate 1D W2 distances (exact W2 when d = 1).
MetricReport w2_coordinatewise(const Matrix& a, const Matrix& b);

struct KlOptions {
  std::optional<double> bandwidth;  // overrides Silverman's rule (per coordinate scale factor in 2D)
  std::size_t grid_points = 0;      // 0: 4001 in 1D, 241 per axis in 2D
};

// KL(pi || q), q a Gaussian KDE of the samples, integrated over +-6 target sds.
MetricReport kl_estimate(const Target& target, const Matrix& samples, const KlOptions& options = {});
double silverman_bandwidth(const std::vector<double>& x);

inline constexpr double kDefaultProminence = 0.01;
// Interior strict local maxima (plateaus collapsed) taller than prominence * global max.
std::size_t mode_count(const std::vector<double>& values, double prominence = kDefaultProminence);

struct HessianSupResult {
  double value = 0.0;         // overall max spectral norm
  double sample_max = 0.0;    // over points drawn from mu_t
  std::vector<double> ring_radii;
  std::vector<double> ring_max;
  bool unbounded = false;     // ring maxima keep growing past twice the sample max
  std::size_t points = 0;
};

// Spectral norms of the marginal Hessian at the columns of `points`.
std::vector<double> hessian_norms_at(const DiffusionPath& path, double t, const Matrix& points,
                                     const ScoreOptions& options = {});
HessianSupResult hessian_sup_estimate(const DiffusionPath& path, double t, std::size_t n_points, std::uint64_t seed,
                                      const ScoreOptions& options = {});
// Growth flag for maxima listed by increasing radius.
bool looks_unbounded(const std::vector<double>& maxima_by_radius, double reference);

// Mean of |X|^p with its jackknife standard error, p in {2, 4, 6, 8}.
MetricReport moment_estimate(const Matrix& samples, int p);

}  // namespace dalmc

#endif  // DALMC_DIAGNOSTICS_HPP
