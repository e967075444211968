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
#include <numeric>

#include "dalmc/sampler.hpp"
#include "support.hpp"

using namespace dalmc;
using dalmc::testing::Gen;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

DiffusionPath gaussian_path(double m, double v) {
  return DiffusionPath(BaseDistribution::gaussian(1, 1.0), make_gaussian_1d(m, v), Schedule::cosine(1.0, 1.0));
}

DiffusionPath heavy_path() {
  DiffusionPath p(BaseDistribution::student_t(1, 1.0, 4.0), StudentT::isotropic(1, 1.0, 4.0), Schedule::cosine(1.0, 1.0));
  p.set_constants(analyze_smoothness(p.target()).constants());
  return p;
}

LipschitzProfile step_profile(std::vector<double> times, std::vector<double> bounds) {
  LipschitzProfile p;
  p.times = std::move(times);
  p.bounds = std::move(bounds);
  return p;
}

}  // namespace

TEST_CASE("uniform step plan") {
  const std::vector<double> h = step_size_plan(1.0, 0.1, 10, StepPlan::kUniform);
  REQUIRE(h.size() == 10);
  for (double v : h) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("adaptive step plan") {
  const LipschitzProfile flat = step_profile({0.0, 0.5, 1.0}, {3.0, 3.0, 3.0});
  const std::vector<double> a = step_size_plan(1.0, 0.1, 8, StepPlan::kLipschitzAdaptive, &flat);
  for (double v : a) CHECK(v == doctest::Approx(10.0 / 8.0).epsilon(1e-12));

  // L doubles on the second half, so the second half carries twice the steps.
  const LipschitzProfile doubled = step_profile({0.0, 0.5, 1.0}, {1.0, 2.0, 2.0});
  const std::vector<double> b = step_size_plan(1.0, 0.1, 9, StepPlan::kLipschitzAdaptive, &doubled);
  CHECK(b.front() == doctest::Approx(2.0 * b.back()).epsilon(1e-12));
  CHECK(std::accumulate(b.begin(), b.end(), 0.0) == doctest::Approx(10.0).epsilon(1e-12));

  CHECK_THROWS_AS(step_size_plan(1.0, 0.1, 8, StepPlan::kLipschitzAdaptive, nullptr), Error);
}

TEST_CASE("property: step plans are positive and sum to T / kappa") {
  Gen g(31);
  for (int trial = 0; trial < 100; ++trial) {
    const double horizon = g.uniform(0.5, 5.0);
    const double kappa = g.uniform(0.001, 0.99);
    const std::size_t steps = static_cast<std::size_t>(g.integer(1, 3000));
    const std::size_t nodes = static_cast<std::size_t>(g.integer(2, 50));
    std::vector<double> ts, ls;
    for (std::size_t i = 0; i < nodes; ++i) {
      ts.push_back(horizon * static_cast<double>(i) / static_cast<double>(nodes - 1));
      ls.push_back(g.uniform(0.1, 100.0));
    }
    const LipschitzProfile prof = step_profile(ts, ls);
    for (StepPlan mode : {StepPlan::kUniform, StepPlan::kLipschitzAdaptive}) {
      const std::vector<double> h = step_size_plan(horizon, kappa, steps, mode, &prof);
      CHECK(h.size() == steps);
      CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(horizon / kappa).epsilon(1e-9));
      CHECK(*std::min_element(h.begin(), h.end()) > 0.0);
    }
  }
}

TEST_CASE("score perturbations") {
  const DiffusionPath p = gaussian_path(3.0, 4.0);
  const ScoreOracle base(p, 0.1);
  const ScoreOracle same = perturb_score(base, ScorePerturbation::none());
  Rng rng(1);
  for (double t : {0.0, 3.0, 10.0}) CHECK(same(v1(1.0), t, 0, rng) == base(v1(1.0), t, 0, rng));
  CHECK(same.implied_eps_score() == 0.0);

  const ScoreOracle biased = perturb_score(base, ScorePerturbation::additive_bias(v1(0.1)));
  CHECK(biased.implied_eps_score_sq() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(biased(v1(1.0), 5.0, 0, rng)(0) == doctest::Approx(base(v1(1.0), 5.0, 0, rng)(0) + 0.1).epsilon(1e-15));

  const ScoreOracle quiet = perturb_score(base, ScorePerturbation::gaussian_noise(0.0));
  CHECK(quiet.implied_eps_score() == 0.0);
  CHECK_THROWS_AS(ScorePerturbation::gaussian_noise(-1.0), Error);
}

TEST_CASE("unperturbed oracle reproduces the path score at the dilated time") {
  SUBCASE("closed form") {
    const DiffusionPath p = gaussian_path(3.0, 4.0);
    const ScoreOracle o(p, 0.2);
    Rng rng(0);
    for (double t : {0.0, 1.7, 5.0}) {
      CHECK(o(v1(0.4), t, 9, rng) == p.marginal_score(0.2 * t, v1(0.4)).score);
    }
  }
  SUBCASE("importance sampling with a fixed seed") {
    const DiffusionPath p = heavy_path();
    ScoreOptions opts;
    opts.method = ScoreMethod::kSnis;
    opts.particles = 5000;
    const ScoreOracle o(p, 0.5, opts);
    Rng rng(0);
    for (double t : {0.3, 1.1}) {
      opts.seed = 42;
      CHECK(o.exact(v1(0.7), t, 42).score == p.marginal_score(0.5 * t, v1(0.7), opts).score);
      CHECK(o(v1(0.7), t, 42, rng) == o.exact(v1(0.7), t, 42).score);
    }
  }
}

TEST_CASE("sampler config validation") {
  SamplerConfig c;
  c.kappa = 1.0;
  CHECK_THROWS_AS(validate_sampler_config(c), Error);
  c.kappa = 0.1;
  c.chains = 0;
  CHECK_THROWS_AS(validate_sampler_config(c), Error);
  c.chains = 10;
  c.steps = 0;
  CHECK_THROWS_AS(validate_sampler_config(c), Error);
}

TEST_CASE("trajectory structure") {
  SamplerConfig c;
  c.kappa = 0.1;
  c.steps = 50;
  c.chains = 64;
  c.record_every = 7;
  c.seed = 3;
  const Trajectory tr = dalmc_run(gaussian_path(3.0, 4.0), c);
  CHECK(tr.chains == 64);
  CHECK(tr.steps == 50);
  CHECK(tr.step_sizes.size() == 50);
  CHECK(tr.times.size() == 51);
  CHECK(tr.times.back() == doctest::Approx(10.0).epsilon(1e-12));
  for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  REQUIRE(!tr.recorded_steps.empty());
  CHECK(tr.recorded_steps.back() == 50);
  for (std::size_t i = 1; i < tr.recorded_steps.size(); ++i) CHECK(tr.recorded_steps[i] > tr.recorded_steps[i - 1]);
  CHECK(tr.recorded_states.size() == tr.recorded_steps.size());
  CHECK(tr.final_samples.cols() == 64);
  CHECK(tr.oracle_mode == "closed_form");
}

TEST_CASE("determinism and chain independence") {
  SamplerConfig c;
  c.kappa = 0.2;
  c.steps = 40;
  c.chains = 30;
  c.seed = 11;
  const DiffusionPath p = gaussian_path(-1.0, 0.5);
  const Trajectory a = dalmc_run(p, c);
  const Trajectory b = dalmc_run(p, c);
  CHECK(a.final_samples == b.final_samples);

  c.threads = 3;
  CHECK(dalmc_run(p, c).final_samples == a.final_samples);

  // Chain i depends on (seed, i) only: a shorter run is a prefix of a longer one.
  c.threads = 1;
  c.chains = 12;
  const Trajectory head = dalmc_run(p, c);
  CHECK(head.final_samples == a.final_samples.leftCols(12));

  c.seed = 12;
  CHECK(dalmc_run(p, c).final_samples != head.final_samples);
}

TEST_CASE("stationarity when target equals base") {
  SamplerConfig c;
  c.kappa = 0.1;
  c.steps = 500;
  c.chains = 4000;
  c.seed = 5;
  const Trajectory tr = dalmc_run(gaussian_path(0.0, 1.0), c);
  const double mean = tr.final_samples.mean();
  const double var = (tr.final_samples.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.06);
  CHECK(std::abs(var - 1.0) < 0.1);
}

TEST_CASE("Gaussian path: moments follow the Euler recursion and approach the continuous flow") {
  // With a linear score -(x - a)/v the iteration maps mean and variance exactly:
  // m <- m + h (a - m) / v and s <- (1 - h / v)^2 s + 2 h.
  const Schedule sched = Schedule::cosine(1.0, 1.0);
  const DiffusionPath p = gaussian_path(3.0, 4.0);
  const double kappa = 0.1;
  auto recursion = [&](std::size_t m) {
    const double h = sched.horizon() / kappa / static_cast<double>(m);
    double mean = 0.0, var = 1.0;
    for (std::size_t l = 0; l < m; ++l) {
      const double lam = sched.lambda(std::min(kappa * h * static_cast<double>(l), sched.horizon()));
      const double a = 3.0 * std::sqrt(lam), v = 4.0 * lam + 1.0 - lam;
      mean += h * (a - mean) / v;
      var = (1.0 - h / v) * (1.0 - h / v) * var + 2.0 * h;
    }
    return std::pair{mean, var};
  };
  const auto [cont_mean, cont_var] = recursion(1 << 20);
  double prev = kInf;
  for (std::size_t m : {25, 50, 100, 200}) {
    CAPTURE(m);
    const auto [mean, var] = recursion(m);
    const double gap = std::abs(mean - cont_mean) + std::abs(var - cont_var);
    CHECK(gap < prev);
    prev = gap;
    SamplerConfig c;
    c.kappa = kappa;
    c.steps = m;
    c.chains = 20000;
    c.seed = 77;
    const Trajectory tr = dalmc_run(p, c);
    const double emp_mean = tr.final_samples.mean();
    const double emp_var = (tr.final_samples.array() - emp_mean).square().mean();
    CHECK(std::abs(emp_mean - mean) < 5.0 * std::sqrt(var / 20000.0));
    CHECK(std::abs(emp_var - var) < 5.0 * var * std::sqrt(2.0 / 20000.0));
  }
}

TEST_CASE("blow-up flags chains and fails the run") {
  SamplerConfig c;
  c.kappa = 0.1;
  c.steps = 20;
  c.chains = 50;
  const DiffusionPath p = gaussian_path(0.0, 1.0);
  const ScoreOracle wild(p, 0.1, {}, ScorePerturbation::additive_bias(v1(1e8)));
  CHECK_THROWS_AS(dalmc_run(p, c, wild), Error);
}

TEST_CASE("oracle modes on a heavy-tailed path") {
  SamplerConfig c;
  c.kappa = 0.5;
  c.steps = 20;
  c.chains = 200;
  c.profile_points = 50;
  const DiffusionPath p = heavy_path();
  c.oracle_mode = OracleMode::kTabulated;
  const Trajectory tab = dalmc_run(p, c);
  CHECK(tab.oracle_mode == "tabulated");
  ScoreOptions opts;
  opts.particles = 2000;
  c.oracle_mode = OracleMode::kDirect;
  const Trajectory direct = dalmc_run(p, c, ScoreOracle(p, c.kappa, opts));
  CHECK(direct.oracle_mode == "direct");
  // Same driving noise, different score evaluators: the paths stay close.
  CHECK((tab.final_samples - direct.final_samples).cwiseAbs().maxCoeff() < 0.1);
}
