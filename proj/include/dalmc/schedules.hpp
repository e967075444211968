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

#ifndef DALMC_SCHEDULES_HPP
#define DALMC_SCHEDULES_HPP

#include <cstddef>
#include <string>

#include "dalmc/common.hpp"

namespace dalmc {

enum class ScheduleFamily { kCosine, kTanh, kOu, kConstant };

// A5: sup |d/dt log lambda|.  A7: sup |lambda'| / sqrt(lambda (1 - lambda)).
enum class ScheduleCondition { kA5Log, kA7Sqrt };

inline constexpr double kScheduleDivergence = 1e6;

class Schedule {
 public:
  static Schedule cosine(double phi, double horizon);
  static Schedule tanh(double phi, double horizon);
  static Schedule ou(double horizon);
  static Schedule constant(double horizon);
  // Accepts "cosine", "tanh", "sigmoid" (alias of tanh), "ou", "constant".
  static Schedule from_name(const std::string& family, double phi, double horizon);

  ScheduleFamily family() const { return family_; }
  std::string family_name() const;
  double phi() const { return phi_; }
  double horizon() const { return horizon_ / kappa_; }

  double lambda(double t) const;
  double lambda_dot(double t) const;
  // Value of the chosen functional at t, with analytic endpoint limits (may be +inf).
  double functional(ScheduleCondition condition, double t) const;

  // The slowed-down schedule s -> lambda(kappa s) on [0, T / kappa].
  Schedule dilated(double kappa) const;
  double kappa() const { return kappa_; }

  // Smallest t with lambda(t) >= value (bisection; lambda is non-decreasing).
  double time_for_lambda(double value) const;

 private:
  Schedule(ScheduleFamily family, double phi, double horizon);
  void check_time(double t) const;
  double base_lambda(double s) const;
  double base_lambda_dot(double s) const;
  double base_functional(ScheduleCondition condition, double s) const;

  ScheduleFamily family_;
  double phi_;
  double horizon_;      // horizon of the undilated schedule
  double kappa_ = 1.0;  // time dilation factor
  double tanh_g0_ = 0.0;
  double tanh_gt_ = 1.0;
};

double schedule_constant(const Schedule& schedule, ScheduleCondition condition, std::size_t grid_size = 10000);

std::string condition_name(ScheduleCondition condition);

}  // namespace dalmc

#endif  // DALMC_SCHEDULES_HPP
