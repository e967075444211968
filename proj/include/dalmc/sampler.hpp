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

#ifndef DALMC_SAMPLER_HPP
#define DALMC_SAMPLER_HPP

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "dalmc/common.hpp"
#include "dalmc/paths.hpp"

namespace dalmc {

enum class StepPlan { kUniform, kLipschitzAdaptive };

std::string step_plan_name(StepPlan plan);
StepPlan step_plan_from_name(const std::string& name);

// Step sizes h_1..h_M summing to horizon / kappa. The adaptive plan reads the
// profile as piecewise constant (left values) on the undilated time axis and
// places the step boundaries so that every step carries the same integral of L.
std::vector<double> step_size_plan(double horizon, double kappa, std::size_t steps, StepPlan mode,
                                   const LipschitzProfile* profile = nullptr);

struct ScorePerturbation {
  enum class Kind { kNone, kBias, kNoise };
  Kind kind = Kind::kNone;
  Vector bias;       // additive bias b
  double tau = 0.0;  // per-coordinate noise standard deviation

  static ScorePerturbation none() { return {}; }
  static ScorePerturbation additive_bias(Vector b);
  static ScorePerturbation gaussian_noise(double tau);
  std::string name() const;
};

// How the oracle reaches the path score during a run.
enum class OracleMode {
  kAuto,       // closed form when available, tabulated quadrature for other 1D paths, SNIS otherwise
  kDirect,     // every evaluation goes through marginal_score
  kTabulated,  // per-step cubic Hermite tables built from 1D quadrature
};

// s_theta(x, t) on the dilated clock: the path score at lambda(kappa t), plus an optional perturbation.
class ScoreOracle {
 public:
  ScoreOracle(DiffusionPath path, double kappa, ScoreOptions options = {},
              ScorePerturbation perturbation = ScorePerturbation::none());

  const DiffusionPath& path() const { return path_; }
  double kappa() const { return kappa_; }
  const ScoreOptions& options() const { return options_; }
  const ScorePerturbation& perturbation() const { return perturbation_; }

  // Unperturbed path score at dilated time t, with `seed` driving any Monte Carlo.
  ScoreEstimate exact(const Vector& x, double t, std::uint64_t seed) const;
  // Perturbed score; noise perturbations draw from `rng`.
  Vector operator()(const Vector& x, double t, std::uint64_t seed, Rng& rng) const;

  // Implied squared score-error budget over a run of total length horizon / kappa.
  double implied_eps_score_sq() const;
  double implied_eps_score() const;

  // Builds per-step caches for the left grid points `times` (dilated clock).
  void prepare(const std::vector<double>& times, OracleMode mode, int threads);
  bool prepared() const { return static_cast<bool>(cache_); }
  // Perturbed score at the prepared step l. `ess` receives the SNIS ESS when used.
  void at_step(std::size_t l, const Vector& x, std::uint64_t seed, Rng& rng, Vector& out, double* ess) const;
  std::string mode_name() const;

 private:
  struct Cache;
  void apply_perturbation(Vector& s, Rng& rng) const;

  DiffusionPath path_;
  double kappa_;
  ScoreOptions options_;
  ScorePerturbation perturbation_;
  std::shared_ptr<const Cache> cache_;
};

ScoreOracle perturb_score(const ScoreOracle& oracle, const ScorePerturbation& perturbation);

struct SamplerConfig {
  double kappa = 0.1;
  std::size_t steps = 500;
  StepPlan step_plan = StepPlan::kUniform;
  std::size_t chains = 1000;
  std::uint64_t seed = 0;
  // Record states every this many steps (0: initial and final states only).
  std::size_t record_every = 0;
  int threads = 1;
  OracleMode oracle_mode = OracleMode::kAuto;
  std::size_t profile_points = 1000;
};

void validate_sampler_config(const SamplerConfig& config);

struct Trajectory {
  std::size_t chains = 0;
  std::size_t steps = 0;
  std::vector<double> step_sizes;           // h_l, l = 0..M-1
  std::vector<double> times;                // t_l on the dilated clock, l = 0..M
  std::vector<std::size_t> recorded_steps;  // strictly increasing, ends at M
  std::vector<Matrix> recorded_states;      // d x chains per recorded step
  Matrix final_samples;                     // d x (chains - flagged), flagged chains removed
  std::vector<std::size_t> flagged_chains;
  std::vector<double> mean_ess;             // per step; NaN where SNIS was not used
  double implied_eps_score = 0.0;
  std::string oracle_mode;
};

// Euler-Maruyama DALMC: X_{l+1} = X_l + h_l s(X_l, t_l) + sqrt(2 h_l) xi_l, X_0 ~ base.
Trajectory dalmc_run(const DiffusionPath& path, const SamplerConfig& config, ScoreOracle oracle);
Trajectory dalmc_run(const DiffusionPath& path, const SamplerConfig& config);

}  // namespace dalmc

#endif  // DALMC_SAMPLER_HPP
