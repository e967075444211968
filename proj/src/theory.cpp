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

#include "dalmc/theory.hpp"

#include <algorithm>
#include <cmath>

#include "dalmc/common.hpp"

namespace dalmc {

namespace {

void require_finite_positive(const std::optional<double>& v, const char* name) {
  if (!v) fail(ErrorCode::kInvalidArgument, std::string("planner input '") + name + "' is required");
  if (!std::isfinite(*v) || !(*v > 0.0)) {
    fail(ErrorCode::kInvalidArgument, std::string("planner input '") + name + "' must be finite and positive");
  }
}

Plan kappa_part(const PlannerInput& in) {
  Plan p;
  const double scale = std::max(in.M2, static_cast<double>(in.d));
  p.kappa = in.eps * in.eps / scale;
  if (p.kappa > kKappaCeiling) {
    p.kappa = kKappaCeiling;
    p.kappa_clamped = true;
  }
  return p;
}

// ceil with a relative guard so that exact products such as 1.28e8 do not round up.
double guarded_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return std::max(1.0, r);
  return std::max(1.0, std::ceil(v));
}

}  // namespace

void validate_planner_input(const PlannerInput& in) {
  if (!(in.eps > 0.0) || !std::isfinite(in.eps)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  if (in.d < 1) fail(ErrorCode::kInvalidArgument, "d must be at least 1");
  if (!(in.M2 >= 0.0) || !std::isfinite(in.M2)) fail(ErrorCode::kInvalidArgument, "M2 must be non-negative");
}

Plan plan_gaussian(const PlannerInput& in) {
  validate_planner_input(in);
  require_finite_positive(in.L_max, "L_max");
  Plan p = kappa_part(in);
  const double s = std::max(in.M2, static_cast<double>(in.d));
  const double L = *in.L_max;
  p.steps = guarded_ceil(in.d * s * s * L * L / std::pow(in.eps, 6));
  return p;
}

Plan plan_relaxed(const PlannerInput& in) {
  validate_planner_input(in);
  require_finite_positive(in.L_pi, "L_pi");
  require_finite_positive(in.K_pi, "K_pi");
  Plan p = kappa_part(in);
  const double s = std::max(in.M2, static_cast<double>(in.d));
  const double d = in.d;
  const double L = *in.L_pi;
  const double inner = std::max({d * d, L * L * d, *in.K_pi});
  p.steps = guarded_ceil(s * s * inner * L / std::pow(in.eps, 6));
  return p;
}

Plan plan_heavy(const PlannerInput& in) {
  if (!in.alpha) fail(ErrorCode::kInvalidArgument, "planner input 'alpha' is required");
  if (!(*in.alpha > 2.0)) fail(ErrorCode::kInvalidArgument, "alpha must exceed 2");
  Plan p = plan_gaussian(in);
  p.alpha_factor = std::isinf(*in.alpha) ? 1.0 : *in.alpha / (*in.alpha - 2.0);
  return p;
}

double kl_rhs_gaussian(double kappa, double steps, double L_max, double M2, int d, double int_L2, double eps_score) {
  for (double v : {kappa, steps, L_max, M2, int_L2, eps_score}) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorCode::kInvalidArgument, "KL bound inputs must be finite and non-negative");
  }
  if (!(kappa > 0.0) || !(steps > 0.0) || d < 1) fail(ErrorCode::kInvalidArgument, "kappa, M and d must be positive");
  const double mk = steps * kappa;
  const double first = (1.0 + L_max * L_max / (mk * mk * kappa * kappa)) * kappa * (M2 + d);
  const double second = (d / (steps * kappa * kappa)) * (1.0 + L_max / mk) * int_L2;
  return first + second + eps_score * eps_score;
}

}  // namespace dalmc
