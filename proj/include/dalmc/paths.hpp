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

#ifndef DALMC_PATHS_HPP
#define DALMC_PATHS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dalmc/common.hpp"
#include "dalmc/schedules.hpp"
#include "dalmc/targets.hpp"

namespace dalmc {

enum class BaseKind { kGaussian, kStudentT };

// Base distribution nu: N(0, sigma^2 I) or t(0, sigma^2 I, alpha).
class BaseDistribution {
 public:
  static BaseDistribution gaussian(int dim, double sigma);
  static BaseDistribution student_t(int dim, double sigma, double alpha);

  BaseKind kind() const { return kind_; }
  bool heavy_tailed() const { return kind_ == BaseKind::kStudentT; }
  int dim() const { return dim_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  std::string name() const;

  // The noise law with scale matrix (factor * sigma^2) I.
  TargetPtr kernel(double variance_factor) const;
  TargetPtr distribution() const { return kernel(1.0); }

  // E|sigma Z|^2: sigma^2 d, or sigma^2 d alpha / (alpha - 2).
  double noise_second_moment() const;
  // Lipschitz constant of the base score: 1/sigma^2, or (alpha + d)/(alpha sigma^2).
  double lipschitz() const;

 private:
  BaseDistribution(BaseKind kind, int dim, double sigma, double alpha);
  BaseKind kind_;
  int dim_;
  double sigma_;
  double alpha_;
};

enum class ScoreMethod { kAuto, kClosedForm, kSnis, kQuadrature };

std::string score_method_name(ScoreMethod method);

struct ScoreOptions {
  ScoreMethod method = ScoreMethod::kAuto;
  std::size_t particles = 10000;
  std::size_t max_particles = 1000000;
  double ess_floor = 50.0;
  // When positive, particles keep doubling until successive estimates agree to this relative level.
  double rel_tol = 0.0;
  std::uint64_t seed = 0;
};

struct ScoreEstimate {
  Vector score;
  double ess = std::numeric_limits<double>::quiet_NaN();
  std::size_t particles = 0;
  ScoreMethod method = ScoreMethod::kClosedForm;
};

class DiffusionPath {
 public:
  DiffusionPath(BaseDistribution base, TargetPtr target, Schedule schedule);

  const BaseDistribution& base() const { return base_; }
  const Target& target() const { return *target_; }
  const TargetPtr& target_ptr() const { return target_; }
  const Schedule& schedule() const { return schedule_; }
  int dim() const { return target_->dim(); }

  void set_constants(SmoothnessConstants constants) { constants_ = std::move(constants); }
  const std::optional<SmoothnessConstants>& constants() const { return constants_; }

  double lambda(double t) const { return schedule_.lambda(t); }

  // True when every marginal has a closed form (Gaussian base, target closed under Gaussian smoothing).
  bool has_closed_form() const;
  // Marginal at a given lambda as a Target, or nullptr when no closed form exists.
  TargetPtr closed_form_marginal(double lambda) const;

  double marginal_log_density_at(double lambda, const Vector& x) const;
  double marginal_density_at(double lambda, const Vector& x) const;
  ScoreEstimate marginal_score_at(double lambda, const Vector& x, const ScoreOptions& options = {}) const;
  Matrix marginal_hessian_at(double lambda, const Vector& x, const ScoreOptions& options = {}) const;

  double marginal_density(double t, const Vector& x) const { return marginal_density_at(lambda(t), x); }
  ScoreEstimate marginal_score(double t, const Vector& x, const ScoreOptions& options = {}) const {
    return marginal_score_at(lambda(t), x, options);
  }
  Matrix marginal_hessian(double t, const Vector& x, const ScoreOptions& options = {}) const {
    return marginal_hessian_at(lambda(t), x, options);
  }

  // Exact draws sqrt(lambda) X + sqrt(1 - lambda) sigma Z, as a d x n matrix.
  Matrix sample_marginal_at(double lambda, std::size_t n, std::uint64_t seed) const;

 private:
  BaseDistribution base_;
  TargetPtr target_;
  Schedule schedule_;
  std::optional<SmoothnessConstants> constants_;
};

// Score and log density of the 1D marginal by adaptive quadrature of the convolution.
struct QuadratureResult {
  double log_density = 0.0;
  double score = 0.0;
  double hessian = 0.0;
  double abs_error = 0.0;  // relative error estimate of the normalising integral
};
QuadratureResult marginal_quadrature_1d(const DiffusionPath& path, double lambda, double x, bool derivatives);

// Self-normalised importance sampling over the posterior of the clean point given x.
ScoreEstimate marginal_score_snis(const DiffusionPath& path, double lambda, const Vector& x,
                                  const ScoreOptions& options, Matrix* hessian = nullptr);

class GeometricPath {
 public:
  GeometricPath(TargetPtr base, TargetPtr target, Schedule schedule);

  const Schedule& schedule() const { return schedule_; }
  // (1 - lambda) log nu + lambda log pi, unnormalised.
  double unnormalized_log_density(double lambda, const Vector& x) const;
  Vector score(double lambda, const Vector& x) const;
  // Density normalised over the supplied 1D grid by the trapezoid rule.
  std::vector<double> normalized_density_on_grid(double lambda, const std::vector<double>& grid) const;

 private:
  TargetPtr base_;
  TargetPtr target_;
  Schedule schedule_;
};

Vector geometric_score(const GeometricPath& path, double lambda, const Vector& x);

struct LipschitzBound {
  double value = kInf;
  std::string regime;
  std::optional<double> poincare;
};

LipschitzBound lipschitz_bound_at(const DiffusionPath& path, double lambda);
inline LipschitzBound lipschitz_bound(const DiffusionPath& path, double t) { return lipschitz_bound_at(path, path.lambda(t)); }

struct LipschitzProfile {
  std::vector<double> times;
  std::vector<double> bounds;
  std::vector<std::string> regimes;
  std::vector<std::optional<double>> poincare;
  double max = 0.0;
};

LipschitzProfile lipschitz_profile(const DiffusionPath& path, std::size_t grid_points);

struct ActionBound {
  double value = kInf;
  ScheduleCondition condition = ScheduleCondition::kA7Sqrt;
  double c_lambda = kInf;
  double second_moment = 0.0;
  std::optional<double> a5_bound;
  std::optional<double> a7_bound;
};

ActionBound action_bound(const DiffusionPath& path, std::size_t grid_size = 10000);

struct ActionEstimate {
  double value = 0.0;
  std::string method;
  std::vector<std::string> warnings;
};

// Exact Bures distances for Gaussian targets, quantile coupling in 1D, and the
// kinetic energy of the conditional velocity field for other closed-form paths.
ActionEstimate action_estimate(const DiffusionPath& path, std::size_t grid_points, std::size_t n_samples,
                               std::uint64_t seed);

}  // namespace dalmc

#endif  // DALMC_PATHS_HPP
