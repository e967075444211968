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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dalmc/config.hpp"
#include "dalmc/diagnostics.hpp"
#include "support.hpp"

using namespace dalmc;
using dalmc::testing::Gen;

namespace {

Matrix row(const std::vector<double>& v) { return Eigen::Map<const Matrix>(v.data(), 1, static_cast<Eigen::Index>(v.size())); }

std::vector<double> density_grid(const Target& t, double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = t.density(Vector::Constant(1, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  return out;
}

}  // namespace

TEST_CASE("w2 examples") {
  Gen g(1);
  const std::vector<double> a = g.sample(100000, 0.0, 1.0);
  CHECK(w2_1d(a, a) == 0.0);
  const std::vector<double> b = g.sample(100000, 2.0, 1.0);
  CHECK(std::abs(w2_1d(a, b) - 2.0) < 0.02);
  CHECK(w2_1d(std::vector<double>(50, 0.0), std::vector<double>(50, 3.0)) == doctest::Approx(3.0).epsilon(1e-15));

  const MetricReport r = w2_coordinatewise(row(a), row(b));
  CHECK(r.value == doctest::Approx(w2_1d(a, b)).epsilon(1e-14));
  CHECK(std::isfinite(r.value));
  CHECK(r.std_error >= 0.0);
}

TEST_CASE("property: w2 is a metric and scales") {
  Gen g(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 300));
    const std::vector<double> x = g.sample(n, g.uniform(-3, 3), g.uniform(0.1, 3));
    const std::vector<double> y = g.sample(n, g.uniform(-3, 3), g.uniform(0.1, 3));
    const std::vector<double> z = g.sample(n, g.uniform(-3, 3), g.uniform(0.1, 3));
    CHECK(w2_1d(x, z) <= w2_1d(x, y) + w2_1d(y, z) + 1e-9);
    CHECK(w2_1d(x, y) == doctest::Approx(w2_1d(y, x)).epsilon(1e-14));
    const double a = g.uniform(-5.0, 5.0);
    std::vector<double> ax = x, ay = y;
    for (double& v : ax) v *= a;
    for (double& v : ay) v *= a;
    CHECK(w2_1d(ax, ay) == doctest::Approx(std::abs(a) * w2_1d(x, y)).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("KL estimate calibration") {
  const auto n01 = make_gaussian_1d(0.0, 1.0);
  const MetricReport self = kl_estimate(*n01, n01->sample(10000, 3));
  CHECK(std::abs(self.value) < 0.05);
  CHECK(self.value >= -0.05);
  const auto n11 = make_gaussian_1d(1.0, 1.0);
  CHECK(std::abs(kl_estimate(*n01, n11->sample(10000, 4)).value - 0.5) < 0.05);

  std::vector<double> sizes_kl;
  for (std::size_t n : {1000, 10000, 100000}) sizes_kl.push_back(std::abs(kl_estimate(*n01, n01->sample(n, 5)).value));
  CHECK(sizes_kl[2] < sizes_kl[0]);
  CHECK(sizes_kl[2] < 0.005);
}

TEST_CASE("property: KL estimate never falls below the bias floor") {
  Gen g(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = make_gaussian_1d(g.uniform(-2, 2), g.uniform(0.3, 3.0));
    const auto q = make_gaussian_1d(g.uniform(-2, 2), g.uniform(0.3, 3.0));
    CHECK(kl_estimate(*t, q->sample(2000, static_cast<std::uint64_t>(trial))).value >= -0.05);
  }
}

TEST_CASE("mode counting") {
  const auto n01 = make_gaussian_1d(0.0, 1.0);
  CHECK(mode_count(density_grid(*n01, -6.0, 6.0, 401)) == 1);
  const GaussianMixture mix({{0.5, Vector::Constant(1, -4.0), Matrix::Identity(1, 1)},
                             {0.5, Vector::Constant(1, 4.0), Matrix::Identity(1, 1)}});
  CHECK(mode_count(density_grid(mix, -10.0, 10.0, 401)) == 2);
  // Plateaus collapse to a single peak; shallow bumps fall under the prominence.
  CHECK(mode_count({0.0, 1.0, 1.0, 1.0, 0.0}) == 1);
  CHECK(mode_count({0.0, 1.0, 0.0, 0.005, 0.0}) == 1);
  CHECK(mode_count({0.0, 1.0, 0.0, 0.005, 0.0}, 0.001) == 2);
}

TEST_CASE("property: mode counts survive grid refinement on the shipped fixtures") {
  const TargetPtr su = load_target_config(dalmc::testing::config_path("figure1.toml"));
  const TargetPtr base = make_gaussian_1d(0.0, 1.0);
  const DiffusionPath dp(BaseDistribution::gaussian(1, 1.0), su, Schedule::cosine(1.0, 1.0));
  const GeometricPath gp(base, su, Schedule::cosine(1.0, 1.0));
  for (double l = 0.1; l < 0.95; l += 0.1) {
    CAPTURE(l);
    std::size_t prev_d = 0, prev_g = 0;
    for (std::size_t n : {901, 1801, 3601}) {
      std::vector<double> grid(n), dens(n);
      for (std::size_t i = 0; i < n; ++i) {
        grid[i] = -15.0 + 45.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        dens[i] = dp.marginal_density_at(l, Vector::Constant(1, grid[i]));
      }
      const std::size_t md = mode_count(dens);
      const std::size_t mg = mode_count(gp.normalized_density_on_grid(l, grid));
      if (n > 901) {
        CHECK(md == prev_d);
        CHECK(mg == prev_g);
      }
      prev_d = md;
      prev_g = mg;
    }
  }
}

TEST_CASE("Hessian supremum") {
  const DiffusionPath p(BaseDistribution::gaussian(1, 1.0), make_gaussian_1d(2.0, 4.0), Schedule::cosine(1.0, 1.0));
  for (double t : {0.0, 0.5, 1.0}) {
    const double var = 4.0 * p.lambda(t) + 1.0 - p.lambda(t);
    const HessianSupResult r = hessian_sup_estimate(p, t, 200, 9);
    CHECK(r.value == doctest::Approx(1.0 / var).epsilon(1e-13));
    CHECK_FALSE(r.unbounded);
  }

  const TargetPtr rm = load_target_config(dalmc::testing::config_path("targets/shared_mean.toml"));
  const DiffusionPath q(BaseDistribution::gaussian(2, 1.0), rm, Schedule::cosine(1.0, 1.0));
  Matrix pts(2, 10);
  for (int i = 0; i < 10; ++i) pts.col(i) << 5.0 + 5.0 * i, 0.0;
  const std::vector<double> norms = hessian_norms_at(q, 1.0, pts);
  CHECK(looks_unbounded(norms, norms.front()));
  CHECK(hessian_sup_estimate(q, 1.0, 500, 3).unbounded);
}

TEST_CASE("moments") {
  const auto n01 = make_gaussian_1d(0.0, 1.0);
  const Matrix xs = n01->sample(1000000, 12);
  CHECK(moment_estimate(xs, 2).value == doctest::Approx(1.0).epsilon(0.01));
  const MetricReport m8 = moment_estimate(xs, 8);
  CHECK(m8.value == doctest::Approx(105.0).epsilon(0.05));
  CHECK(m8.std_error > 0.0);
  const auto t4 = StudentT::isotropic(1, 1.0, 4.0);
  CHECK(moment_estimate(t4->sample(1000000, 13), 2).value == doctest::Approx(2.0).epsilon(0.10));
  CHECK_THROWS_AS(moment_estimate(xs, 3), Error);
}
