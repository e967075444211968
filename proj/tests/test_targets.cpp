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
#include "dalmc/targets.hpp"
#include "support.hpp"

using namespace dalmc;
using dalmc::testing::Gen;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }
Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

GaussianMixture shared_mean_mixture() {
  Matrix p1(2, 2), p2(2, 2);
  p1 << 2, 1, 1, 2;
  p2 << 2, 0, 0, 3;
  return GaussianMixture::from_precisions({0.5, 0.5}, {v2(1, 0), v2(1, 0)}, {p1, p2});
}

// Hessian of log sum_i w_i N(x; m_i, P_i^-1) written out from the component
// scores g_i = -P_i (x - m_i) and responsibilities r_i.
Matrix mixture_hessian_oracle(const std::vector<double>& w, const std::vector<Vector>& m,
                              const std::vector<Matrix>& p, const Vector& x) {
  const std::size_t k = w.size();
  std::vector<double> logs(k);
  double top = -kInf;
  for (std::size_t i = 0; i < k; ++i) {
    const Vector u = x - m[i];
    logs[i] = std::log(w[i]) + 0.5 * std::log(p[i].determinant()) - 0.5 * u.dot(p[i] * u);
    top = std::max(top, logs[i]);
  }
  double z = 0.0;
  for (double l : logs) z += std::exp(l - top);
  const int d = static_cast<int>(x.size());
  Matrix h = Matrix::Zero(d, d);
  Vector gbar = Vector::Zero(d);
  for (std::size_t i = 0; i < k; ++i) {
    const double r = std::exp(logs[i] - top) / z;
    const Vector g = -p[i] * (x - m[i]);
    h += r * (-p[i] + g * g.transpose());
    gbar += r * g;
  }
  return h - gbar * gbar.transpose();
}

double trapezoid_mass(const Target& t, double lo, double hi, std::size_t n) {
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std::exp(t.log_density_or_neg_inf(v1(lo + dx * static_cast<double>(i))));
    s += (i == 0 || i + 1 == n) ? 0.5 * f : f;
  }
  return s * dx;
}

}  // namespace

TEST_CASE("density closed forms") {
  const auto n01 = make_gaussian_1d(0.0, 1.0);
  CHECK(n01->density(v1(0.0)) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(n01->density(v1(0.0)) == doctest::Approx(0.398942).epsilon(1e-6));

  // Normaliser Gamma((a+1)/2) / (Gamma(a/2) sqrt(a pi)) at a = 4.
  const auto t4 = StudentT::isotropic(1, 1.0, 4.0);
  const double oracle = std::exp(std::lgamma(2.5) - std::lgamma(2.0)) / std::sqrt(4.0 * std::numbers::pi);
  CHECK(oracle == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(t4->density(v1(0.0)) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(trapezoid_mass(*t4, -3000.0, 3000.0, 1200001) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("smoothed uniform mixture integrates to one") {
  const SmoothedUniformMixture su(10.0);
  CHECK(su.gaussian_weight() == doctest::Approx(1.0 - std::exp(-25.0)).epsilon(1e-15));
  CHECK(trapezoid_mass(su, -40.0, 60.0, 400001) == doctest::Approx(1.0).epsilon(1e-8));
  const SmoothedUniformMixture su2(2.0);
  CHECK(trapezoid_mass(su2, -20.0, 20.0, 400001) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("score and Hessian closed forms") {
  CHECK(make_gaussian_1d(0.0, 1.0)->score(v1(2.0))(0) == doctest::Approx(-2.0).epsilon(1e-15));
  const auto t4 = StudentT::isotropic(1, 1.0, 4.0);
  CHECK(t4->score(v1(1.0))(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(t4->hessian_log_density(v1(0.0))(0, 0) == doctest::Approx(-1.25).epsilon(1e-14));
  for (double s2 : {0.25, 1.0, 9.0}) {
    const auto g = make_gaussian_1d(1.5, s2);
    for (double x : {-3.0, 0.0, 7.0}) CHECK(g->hessian_log_density(v1(x))(0, 0) == doctest::Approx(-1.0 / s2).epsilon(1e-14));
  }
  const GaussianMixture rm = shared_mean_mixture();
  CHECK(rm.score(v2(1.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("counterexample mixture Hessian matches the written-out formula and its growth") {
  const GaussianMixture rm = shared_mean_mixture();
  Matrix p1(2, 2), p2(2, 2);
  p1 << 2, 1, 1, 2;
  p2 << 2, 0, 0, 3;
  Gen g(11);
  for (int i = 0; i < 50; ++i) {
    const Vector x = g.vector(2, -20.0, 20.0);
    const Matrix oracle = mixture_hessian_oracle({0.5, 0.5}, {v2(1, 0), v2(1, 0)}, {p1, p2}, x);
    CHECK(dalmc::testing::rel_error(rm.hessian_log_density(x), oracle) < 1e-10);
  }
  // Along (x, 0) the quadratic terms coincide, so responsibilities are fixed by
  // the normalisers: r1 / r2 = sqrt(3) / sqrt(6). The growth coefficient is r1 r2.
  const double r1 = 1.0 / (1.0 + std::sqrt(2.0));
  const double coef = r1 * (1.0 - r1);
  CHECK(coef == doctest::Approx(std::sqrt(2.0) / (3.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-14));
  for (double x : {5.0, 20.0, 50.0}) {
    const double u = x - 1.0;
    const Matrix h = rm.hessian_log_density(v2(x, 0.0));
    Matrix expect = -(r1 * p1 + (1.0 - r1) * p2);
    expect(1, 1) += coef * u * u;
    CHECK(dalmc::testing::rel_error(h, expect) < 1e-10);
  }
}

TEST_CASE("sampling matches moments") {
  const auto t4 = StudentT::isotropic(1, 1.0, 4.0);
  const Matrix xs = t4->sample(100000, 7);
  CHECK(xs.squaredNorm() / 1e5 == doctest::Approx(2.0).epsilon(0.10));

  GaussianMixture mix({{0.5, v1(-4.0), Matrix::Identity(1, 1)}, {0.5, v1(4.0), Matrix::Identity(1, 1)}});
  const Matrix ys = mix.sample(100000, 8);
  const double frac = static_cast<double>((ys.array() > 0.0).count()) / 1e5;
  CHECK(std::abs(frac - 0.5) < 0.01);

  CHECK(t4->second_moment() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(t4->sample(0, 1), Error);
}

TEST_CASE("sampling is deterministic in the seed") {
  const SmoothedUniformMixture su(10.0);
  CHECK(su.sample(500, 3) == su.sample(500, 3));
  CHECK(su.sample(500, 3) != su.sample(500, 4));
}

TEST_CASE("mixture smoothness classification") {
  Gen g(5);
  const Matrix cov = g.spd(2, 0.5, 2.0);
  GaussianMixture equal({{0.3, v2(-2, 0), cov}, {0.7, v2(3, 1), cov}});
  CHECK(check_mixture_smoothness(equal).lipschitz_ok);

  const SmoothnessReport rep = check_mixture_smoothness(shared_mean_mixture());
  CHECK_FALSE(rep.lipschitz_ok);
  REQUIRE(rep.failed_pairs.size() == 1);
  CHECK(rep.failed_pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});

  GaussianMixture one_d({{0.5, v1(0.0), Matrix::Constant(1, 1, 1.0)}, {0.5, v1(3.0), Matrix::Constant(1, 1, 4.0)}});
  const SmoothnessReport r1 = check_mixture_smoothness(one_d);
  CHECK(r1.lipschitz_ok);
  CHECK(std::isfinite(r1.L_pi));
  CHECK(r1.L_pi > 0.0);
}

TEST_CASE("lsi constant bound") {
  CHECK(lsi_constant_bound(2.0, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(lsi_constant_bound(1.0, 1.0, 1.0) == doctest::Approx(2.0 * std::exp(16.0)).epsilon(1e-14));
  CHECK(lsi_constant_bound(2.0, 3.0, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(lsi_constant_bound(0.0, 1.0, 1.0), Error);
}

TEST_CASE("K_pi of the standard normal") {
  const auto n01 = make_gaussian_1d(0.0, 1.0);
  const KpiEstimate k = estimate_K_pi(*n01, 200000, 3);
  CHECK(std::abs(k.value - std::sqrt(105.0)) < 4.0 * k.std_error + 0.05);
  CHECK(k.std_error > 0.0);
  CHECK_THROWS_AS(estimate_K_pi(*n01, 0, 3), Error);
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(make_gaussian_1d(0.0, -1.0), Error);
  CHECK_THROWS_AS(StudentT::isotropic(1, 1.0, 2.0), Error);
  CHECK_THROWS_AS(SmoothedUniformMixture(0.0), Error);
  CHECK_THROWS_AS(GaussianMixture({{0.5, v1(0.0), Matrix::Identity(1, 1)}, {0.6, v1(1.0), Matrix::Identity(1, 1)}}),
                  Error);
  try {
    make_gaussian_1d(0.0, 1.0)->density(v2(0.0, 0.0));
    FAIL("dimension mismatch not raised");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("property: score and Hessian agree with finite differences on random mixtures") {
  Gen g(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = g.integer(1, 3);
    const std::size_t k = static_cast<std::size_t>(g.integer(1, 4));
    const std::vector<double> w = g.weights(k);
    std::vector<GaussianComponentSpec> comps;
    for (std::size_t i = 0; i < k; ++i) comps.push_back({w[i], g.vector(d, -3.0, 3.0), g.spd(d, 0.3, 3.0)});
    const GaussianMixture mix(comps);
    for (int p = 0; p < 10; ++p) {
      const Vector x = g.vector(d, -5.0, 5.0);
      auto f = [&](const Vector& y) { return mix.log_density(y); };
      auto s = [&](const Vector& y) { return mix.score(y); };
      CHECK(dalmc::testing::rel_error(mix.score(x), dalmc::testing::fd_gradient(f, x)) < 1e-5);
      const Matrix h = mix.hessian_log_density(x);
      CHECK(dalmc::testing::rel_error(h, dalmc::testing::fd_jacobian(s, x)) < 1e-4);
      CHECK((h - h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("property: shipped targets pass finite-difference checks") {
  for (const std::string& path : dalmc::testing::shipped_target_configs()) {
    CAPTURE(path);
    const TargetPtr t = load_target_config(path);
    const Matrix pts = dalmc::testing::probe_points(*t, 40, 17);
    auto f = [&](const Vector& y) { return t->log_density(y); };
    auto s = [&](const Vector& y) { return t->score(y); };
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      const Vector x = pts.col(j);
      CHECK(dalmc::testing::rel_error(t->score(x), dalmc::testing::fd_gradient(f, x)) < 1e-5);
      CHECK(dalmc::testing::rel_error(t->hessian_log_density(x), dalmc::testing::fd_jacobian(s, x)) < 1e-4);
    }
  }
}

TEST_CASE("analyze_smoothness constants are coherent") {
  for (const std::string& path : dalmc::testing::shipped_target_configs()) {
    CAPTURE(path);
    const TargetPtr t = load_target_config(path);
    const SmoothnessReport rep = analyze_smoothness(*t, 1);
    if (rep.lipschitz_ok) {
      CHECK(std::isfinite(rep.L_pi));
      CHECK(rep.L_pi > 0.0);
    }
    if (rep.strongly_convex_outside_ball) CHECK(rep.M_pi > 0.0);
  }
}
