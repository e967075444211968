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

#include "dalmc/common.hpp"
#include "dalmc/theory.hpp"
#include "support.hpp"

using namespace dalmc;
using dalmc::testing::Gen;

namespace {

PlannerInput input(double eps, int d, double m2, double l_max) {
  PlannerInput in;
  in.eps = eps;
  in.d = d;
  in.M2 = m2;
  in.L_max = l_max;
  return in;
}

}  // namespace

TEST_CASE("Gaussian planner examples") {
  const Plan p = plan_gaussian(input(0.1, 2, 2.0, 4.0));
  CHECK(p.kappa == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(p.steps == 1.28e8);
  CHECK_FALSE(p.kappa_clamped);

  const Plan half = plan_gaussian(input(0.05, 2, 2.0, 4.0));
  CHECK(half.steps == 64.0 * p.steps);

  const Plan unit = plan_gaussian(input(1.0, 1, 1.0, 1.0));
  CHECK(unit.kappa == kKappaCeiling);
  CHECK(unit.kappa_clamped);
  CHECK(unit.steps == 1.0);
}

TEST_CASE("relaxed planner examples") {
  PlannerInput in = input(1.0, 1, 1.0, 1.0);
  in.L_pi = 1.0;
  in.K_pi = 1.0;
  CHECK(plan_relaxed(in).steps == 1.0);

  in.d = 2;
  in.M2 = 2.0;
  in.K_pi = 100.0;
  CHECK(plan_relaxed(in).steps == 400.0);
}

TEST_CASE("heavy-tailed planner matches the Gaussian planner") {
  PlannerInput in = input(0.1, 2, 2.0, 4.0);
  in.alpha = 4.0;
  const Plan h = plan_heavy(in);
  const Plan g = plan_gaussian(in);
  CHECK(h.kappa == g.kappa);
  CHECK(h.steps == g.steps);
  CHECK(*h.alpha_factor == 2.0);
  in.alpha = kInf;
  CHECK(*plan_heavy(in).alpha_factor == 1.0);
  in.alpha = 1e12;
  CHECK(*plan_heavy(in).alpha_factor == doctest::Approx(1.0).epsilon(1e-9));
  in.alpha = 2.0;
  CHECK_THROWS_AS(plan_heavy(in), Error);
}

TEST_CASE("KL bound examples") {
  CHECK(kl_rhs_gaussian(1.0, 1.0, 1.0, 1.0, 1, 1.0, 1.0) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(kl_rhs_gaussian(1e-3, 1e9, 1.0, 1.0, 1, 1.0, 0.0) < 1e-2);
  CHECK(kl_rhs_gaussian(0.1, 100.0, 2.0, 1.0, 1, 1.0, 0.5) > 0.25);
  CHECK_THROWS_AS(kl_rhs_gaussian(0.0, 1.0, 1.0, 1.0, 1, 1.0, 0.0), Error);
}

TEST_CASE("planner input validation") {
  CHECK_THROWS_AS(plan_gaussian(input(0.0, 1, 1.0, 1.0)), Error);
  CHECK_THROWS_AS(plan_gaussian(input(0.1, 0, 1.0, 1.0)), Error);
  CHECK_THROWS_AS(plan_gaussian(input(0.1, 1, -1.0, 1.0)), Error);
  PlannerInput missing = input(0.1, 1, 1.0, 1.0);
  missing.L_max.reset();
  CHECK_THROWS_AS(plan_gaussian(missing), Error);
  CHECK_THROWS_AS(plan_relaxed(input(0.1, 1, 1.0, 1.0)), Error);
}

TEST_CASE("property: planners are monotone in eps") {
  Gen g(41);
  for (int trial = 0; trial < 200; ++trial) {
    PlannerInput a = input(g.uniform(0.01, 2.0), g.integer(1, 20), g.uniform(0.0, 50.0), g.uniform(0.1, 50.0));
    a.L_pi = g.uniform(0.1, 10.0);
    a.K_pi = g.uniform(0.1, 1000.0);
    a.alpha = g.uniform(2.1, 30.0);
    PlannerInput b = a;
    b.eps = a.eps * g.uniform(1.0, 3.0);
    for (auto planner : {plan_gaussian, plan_relaxed, plan_heavy}) {
      const Plan pa = planner(a), pb = planner(b);
      CHECK(pb.steps <= pa.steps);
      CHECK(pb.kappa >= pa.kappa);
    }
  }
}

TEST_CASE("property: plan then bound stays within a constant multiple of eps squared") {
  // With every constant set to one the planned KL is at most
  // 2 (M2 + d) / max(M2, d) + 2 T plus the O(eps^4) corrections.
  constexpr double kC = 8.0;
  Gen g(43);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = g.integer(1, 10);
    const double m2 = g.uniform(0.1, 30.0), l_max = g.uniform(0.5, 20.0);
    for (double eps : {1.0, 0.5, 0.25}) {
      const Plan p = plan_gaussian(input(eps, d, m2, l_max));
      const double rhs = kl_rhs_gaussian(p.kappa, p.steps, l_max, m2, d, l_max * l_max, 0.0);
      CHECK(rhs <= kC * eps * eps);
    }
  }
}

TEST_CASE("relaxed planner order in the dimension") {
  // M2 = d, L_pi = sqrt(d), K_pi = d^2 leaves M proportional to d^4 L_pi.
  std::vector<double> ratios;
  for (int d : {2, 4, 8}) {
    PlannerInput in = input(0.1, d, d, 1.0);
    in.L_pi = std::sqrt(static_cast<double>(d));
    in.K_pi = static_cast<double>(d) * d;
    ratios.push_back(plan_relaxed(in).steps / (std::pow(d, 4.0) * *in.L_pi));
  }
  for (double r : ratios) CHECK(r == doctest::Approx(ratios.front()).epsilon(0.10));
}
