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

#ifndef DALMC_EXPERIMENT_HPP
#define DALMC_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dalmc/config.hpp"

namespace dalmc {

inline constexpr int kReportSchemaVersion = 1;

// Seed stream for exact reference draws from the target.
inline constexpr std::uint64_t kReferenceStream = 0x3c6ef372fe94f82bULL;

// Smoothness report of the [target] table in `path`, as JSON.
nlohmann::json targets_validate(const std::string& path, std::uint64_t seed = 0);

// Schedule constants for the [schedule] table in `path`.
nlohmann::json schedules_check(const std::string& path);

// Writes <out>/heatmap.csv; returns a summary with the mode counts.
nlohmann::json paths_heatmap(const ExperimentConfig& config);

// Full run: samples.csv, report.json and, when enabled, heatmap.csv in config.out_dir.
// Nothing is written unless every step succeeds.
nlohmann::json run_experiment(const ExperimentConfig& config);

// One row per axis value, averaged over config.sweep->seeds runs; writes <out>/sweep.csv.
nlohmann::json run_sweep(const ExperimentConfig& config);

// Metric battery for a samples CSV (chain, x1..xd) against a target config.
nlohmann::json diagnostics_compare(const std::string& samples_csv, const std::string& target_config,
                                   std::uint64_t seed = 0);

// Planner output. Keys: eps, d, M2, L_max, L_pi, K_pi, alpha, horizon, int_L2, eps_score.
// With "config" set, missing path quantities are derived from that experiment config.
nlohmann::json theory_plan(const nlohmann::json& params);

// CSV helpers shared with the tests.
std::string format_double(double v);
Matrix read_samples_csv(const std::string& path);

}  // namespace dalmc

#endif  // DALMC_EXPERIMENT_HPP
