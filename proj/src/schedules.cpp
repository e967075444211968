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

#include "dalmc/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dalmc {

namespace {
constexpr double kPi = std::numbers::pi;
double sech2(double z) {
  const double c = std::cosh(z);
  return 1.0 / (c * c);
}
}  // namespace

Schedule::Schedule(ScheduleFamily family, double phi, double horizon) : family_(family), phi_(phi), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::kInvalidArgument, "schedule horizon T must be positive");
  if ((family == ScheduleFamily::kCosine || family == ScheduleFamily::kTanh) && !(phi > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "schedule parameter phi must be positive");
  }
  if (family == ScheduleFamily::kTanh) {
    tanh_g0_ = 0.5 * (1.0 + std::tanh(-0.5 * phi));
    tanh_gt_ = 0.5 * (1.0 + std::tanh(0.5 * phi));
  }
}

Schedule Schedule::cosine(double phi, double horizon) { return Schedule(ScheduleFamily::kCosine, phi, horizon); }
Schedule Schedule::tanh(double phi, double horizon) { return Schedule(ScheduleFamily::kTanh, phi, horizon); }
Schedule Schedule::ou(double horizon) { return Schedule(ScheduleFamily::kOu, 0.0, horizon); }
Schedule Schedule::constant(double horizon) { return Schedule(ScheduleFamily::kConstant, 0.0, horizon); }

Schedule Schedule::from_name(const std::string& family, double phi, double horizon) {
  if (family == "cosine") return cosine(phi, horizon);
  if (family == "tanh" || family == "sigmoid") return tanh(phi, horizon);
  if (family == "ou") return ou(horizon);
  if (family == "constant") return constant(horizon);
  fail(ErrorCode::kInvalidArgument, "unknown schedule family '" + family + "'");
}

std::string Schedule::family_name() const {
  switch (family_) {
    case ScheduleFamily::kCosine: return "cosine";
    case ScheduleFamily::kTanh: return "tanh";
    case ScheduleFamily::kOu: return "ou";
    case ScheduleFamily::kConstant: return "constant";
  }
  return "unknown";
}

std::string condition_name(ScheduleCondition condition) {
  return condition == ScheduleCondition::kA5Log ? "A5-log" : "A7-sqrt";
}

Schedule Schedule::dilated(double kappa) const {
  if (!(kappa > 0.0)) fail(ErrorCode::kInvalidArgument, "dilation factor must be positive");
  Schedule s = *this;
  s.kappa_ = kappa_ * kappa;
  return s;
}

void Schedule::check_time(double t) const {
  const double h = horizon();
  if (!(t >= -1e-12 * h && t <= h * (1.0 + 1e-12))) {
    fail(ErrorCode::kDomain, "time " + std::to_string(t) + " outside [0, " + std::to_string(h) + "]");
  }
}

double Schedule::lambda(double t) const {
  check_time(t);
  return base_lambda(std::clamp(kappa_ * t, 0.0, horizon_));
}

double Schedule::lambda_dot(double t) const {
  check_time(t);
  return kappa_ * base_lambda_dot(std::clamp(kappa_ * t, 0.0, horizon_));
}

double Schedule::functional(ScheduleCondition condition, double t) const {
  check_time(t);
  return kappa_ * base_functional(condition, std::clamp(kappa_ * t, 0.0, horizon_));
}

double Schedule::base_lambda(double tau) const {
  const double s = tau / horizon_;
  switch (family_) {
    case ScheduleFamily::kCosine: {
      if (s >= 1.0) return 1.0;
      const double v = std::sin(0.5 * kPi * std::pow(s, phi_));
      return v * v;
    }
    case ScheduleFamily::kTanh: {
      if (s >= 1.0) return 1.0;
      return 0.5 * (1.0 + std::tanh(phi_ * (s - 0.5))) / tanh_gt_;
    }
    case ScheduleFamily::kOu:
      return std::min(1.0, std::exp(-2.0 * (horizon_ - tau)));
    case ScheduleFamily::kConstant:
      return 1.0;
  }
  return 1.0;
}

double Schedule::base_lambda_dot(double tau) const {
  const double s = tau / horizon_;
  const double T = horizon_;
  switch (family_) {
    case ScheduleFamily::kCosine: {
      if (s <= 0.0) {
        if (phi_ > 0.5) return 0.0;
        if (phi_ == 0.5) return kPi * kPi / (4.0 * T);
        return kInf;
      }
      const double u = std::pow(s, phi_);
      return 0.5 * kPi * phi_ / T * std::sin(kPi * u) * std::pow(s, phi_ - 1.0);
    }
    case ScheduleFamily::kTanh:
      return 0.5 * phi_ * sech2(phi_ * (s - 0.5)) / (T * tanh_gt_);
    case ScheduleFamily::kOu:
      // One-sided (left) derivative at t = T.
      return 2.0 * std::exp(-2.0 * (T - tau));
    case ScheduleFamily::kConstant:
      return 0.0;
  }
  return 0.0;
}

double Schedule::base_functional(ScheduleCondition condition, double tau) const {
  const double s = tau / horizon_;
  const double T = horizon_;
  const bool a5 = condition == ScheduleCondition::kA5Log;
  switch (family_) {
    case ScheduleFamily::kCosine: {
      // lambda = sin^2(pi u / 2), u = s^phi, so lambda'/sqrt(lambda(1-lambda)) = (pi phi / T) s^(phi-1)
      // and lambda'/lambda = (pi phi / T) s^(phi-1) cot(pi u / 2).
      if (s <= 0.0) {
        if (a5) return kInf;
        if (phi_ < 1.0) return kInf;
        return phi_ == 1.0 ? kPi / T : 0.0;
      }
      const double base = kPi * phi_ / T * std::pow(s, phi_ - 1.0);
      if (!a5) return base;
      if (s >= 1.0) return 0.0;
      return base / std::tan(0.5 * kPi * std::pow(s, phi_));
    }
    case ScheduleFamily::kTanh: {
      const double z = phi_ * (s - 0.5);
      const double g = 0.5 * (1.0 + std::tanh(z));
      const double gd = 0.5 * phi_ * sech2(z) / T;
      if (a5) return gd / g;
      if (s >= 1.0) return kInf;
      const double lam = g / tanh_gt_;
      return gd / tanh_gt_ / std::sqrt(lam * (1.0 - lam));
    }
    case ScheduleFamily::kOu: {
      if (a5) return 2.0;
      if (tau >= T) return kInf;
      const double lam = std::exp(-2.0 * (T - tau));
      return 2.0 * std::sqrt(lam / (-std::expm1(-2.0 * (T - tau))));
    }
    case ScheduleFamily::kConstant:
      return 0.0;
  }
  return 0.0;
}

double Schedule::time_for_lambda(double value) const {
  double lo = 0.0, hi = horizon();
  if (lambda(lo) >= value) return lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lambda(mid) >= value) hi = mid;
    else lo = mid;
  }
  return hi;
}

double schedule_constant(const Schedule& schedule, ScheduleCondition condition, std::size_t grid_size) {
  if (grid_size < 1000) fail(ErrorCode::kInvalidArgument, "schedule_constant needs at least 1000 grid points");
  const double T = schedule.horizon();
  double best = 0.0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = (i + 1 == grid_size) ? T : T * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const double v = std::abs(schedule.functional(condition, t));
    if (!(v <= kScheduleDivergence)) return kInf;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace dalmc
