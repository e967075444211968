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

#ifndef DALMC_THEORY_HPP
#define DALMC_THEORY_HPP

#include <optional>

namespace dalmc {

// Complexity planners with every hidden constant set to 1.
struct PlannerInput {
  double eps = 0.1;
  int d = 1;
  double M2 = 1.0;
  std::optional<double> L_max;
  std::optional<double> L_pi;
  std::optional<double> K_pi;
  std::optional<double> alpha;
};

struct Plan {
  double kappa = 0.0;
  double steps = 0.0;  // ceil(...) held as a double; can exceed 2^53 for extreme inputs
  bool kappa_clamped = false;
  std::optional<double> alpha_factor;  // alpha / (alpha - 2), heavy-tailed plans only
};

inline constexpr double kKappaCeiling = 0.999;

void validate_planner_input(const PlannerInput& in);

// kappa = eps^2 / (M2 v d), M = ceil(d (M2 v d)^2 L_max^2 / eps^6).
Plan plan_gaussian(const PlannerInput& in);
// M = ceil((M2 v d)^2 max(d^2, L_pi^2 d, K_pi) L_pi / eps^6).
Plan plan_relaxed(const PlannerInput& in);
// Same (kappa, M) as plan_gaussian; reports alpha / (alpha - 2).
Plan plan_heavy(const PlannerInput& in);

// (1 + L^2/(M^2 k^4)) k (M2 + d) + (d/(M k^2)) (1 + L/(M k)) int_L2 + eps_score^2.
double kl_rhs_gaussian(double kappa, double steps, double L_max, double M2, int d, double int_L2, double eps_score);

}  // namespace dalmc

#endif  // DALMC_THEORY_HPP
