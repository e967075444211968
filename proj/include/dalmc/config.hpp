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

#ifndef DALMC_CONFIG_HPP
#define DALMC_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dalmc/paths.hpp"
#include "dalmc/sampler.hpp"
#include "dalmc/schedules.hpp"
#include "dalmc/targets.hpp"

namespace dalmc {

struct BaseSpec {
  BaseKind kind = BaseKind::kGaussian;
  double sigma = 1.0;
  double alpha = 0.0;  // Student's t only
};

struct ScheduleSpec {
  std::string family = "cosine";
  double phi = 1.0;
  double horizon = 1.0;
};

struct SamplerSpec {
  SamplerConfig config;
  ScorePerturbation perturbation;
  ScoreOptions score;
};

struct HeatmapSpec {
  bool enabled = false;
  std::vector<double> lambdas;  // empty: use `times`
  std::vector<double> times;
  double x_min = -5.0;
  double x_max = 5.0;
  std::size_t x_points = 401;
  bool geometric = true;
  double prominence = 0.01;
};

struct DiagnosticsSpec {
  bool bounds = true;
  bool metrics = true;
  std::size_t lipschitz_times = 5;
  std::size_t hessian_points = 1000;
  std::size_t action_grid = 200;
  std::size_t action_samples = 20000;
  std::size_t profile_points = 200;
  std::size_t reference_samples = 0;  // 0: as many as chains
  std::optional<double> kl_bandwidth;
  HeatmapSpec heatmap;
};

enum class SweepAxis { kSteps, kEpsScore, kKappa };

std::string sweep_axis_name(SweepAxis axis);
SweepAxis sweep_axis_from_name(const std::string& name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kSteps;
  std::vector<double> values;
  std::size_t seeds = 1;
};

struct TheorySpec {
  double eps = 0.5;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "out";
  TargetPtr target;
  std::string target_kind;
  BaseSpec base;
  ScheduleSpec schedule;
  SamplerSpec sampler;
  DiagnosticsSpec diagnostics;
  std::optional<SweepSpec> sweep;
  TheorySpec theory;

  BaseDistribution base_distribution() const;
  Schedule make_schedule() const;
  DiffusionPath make_path() const;
};

// Command-line overrides applied after a config is read.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
};

// Parse errors raise ErrorCode::kConfig with the dotted key in the message.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load_experiment_config(const std::string& path, const RunOverrides& overrides = {});

// A file holding at least a [target] table.
TargetPtr parse_target_config(const std::string& text, const std::string& source = "<string>");
TargetPtr load_target_config(const std::string& path);

}  // namespace dalmc

#endif  // DALMC_CONFIG_HPP
