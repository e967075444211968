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

#include <cmath>

#include "dalmc/paths.hpp"
#include "paths/quadrature_2d.hpp"

namespace dalmc {

std::string score_method_name(ScoreMethod method) {
  switch (method) {
    case ScoreMethod::kAuto: return "auto";
    case ScoreMethod::kClosedForm: return "closed_form";
    case ScoreMethod::kSnis: return "snis";
    case ScoreMethod::kQuadrature: return "quadrature";
  }
  return "unknown";
}

DiffusionPath::DiffusionPath(BaseDistribution base, TargetPtr target, Schedule schedule)
    : base_(std::move(base)), target_(std::move(target)), schedule_(std::move(schedule)) {
  if (!target_) fail(ErrorCode::kInvalidArgument, "path needs a target");
  if (target_->dim() != base_.dim()) fail(ErrorCode::kDimensionMismatch, "base and target dimensions differ");
}

bool DiffusionPath::has_closed_form() const {
  return !base_.heavy_tailed() && target_->gaussian_diffused(0.5, base_.sigma()) != nullptr;
}

TargetPtr DiffusionPath::closed_form_marginal(double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kDomain, "lambda must lie in [0, 1]");
  if (lambda == 0.0) return base_.distribution();
  if (lambda == 1.0) return target_;
  if (base_.heavy_tailed()) return nullptr;
  return target_->gaussian_diffused(lambda, base_.sigma());
}

double DiffusionPath::marginal_log_density_at(double lambda, const Vector& x) const {
  if (x.size() != dim()) fail(ErrorCode::kDimensionMismatch, "point dimension differs from path dimension");
  if (auto cf = closed_form_marginal(lambda)) return cf->log_density(x);
  if (dim() == 1) return marginal_quadrature_1d(*this, lambda, x(0), false).log_density;
  if (dim() == 2) return detail::marginal_log_density_quadrature_2d(*this, lambda, x);
  fail(ErrorCode::kInvalidArgument, "quadrature-backed marginal density needs d <= 2");
}

double DiffusionPath::marginal_density_at(double lambda, const Vector& x) const {
  return std::exp(marginal_log_density_at(lambda, x));
}

ScoreEstimate DiffusionPath::marginal_score_at(double lambda, const Vector& x, const ScoreOptions& options) const {
  if (x.size() != dim()) fail(ErrorCode::kDimensionMismatch, "point dimension differs from path dimension");
  ScoreEstimate est;
  const bool endpoint = lambda <= 0.0 || lambda >= 1.0;
  TargetPtr cf = closed_form_marginal(lambda);
  ScoreMethod method = options.method;
  if (endpoint || (method == ScoreMethod::kAuto && cf)) method = ScoreMethod::kClosedForm;
  if (method == ScoreMethod::kAuto) method = ScoreMethod::kSnis;
  switch (method) {
    case ScoreMethod::kClosedForm:
      if (!cf) fail(ErrorCode::kInvalidArgument, "no closed-form marginal for this path");
      est.score = cf->score(x);
      est.method = ScoreMethod::kClosedForm;
      return est;
    case ScoreMethod::kQuadrature: {
      if (dim() != 1) fail(ErrorCode::kInvalidArgument, "quadrature score needs d = 1");
      const auto q = marginal_quadrature_1d(*this, lambda, x(0), true);
      est.score = Vector::Constant(1, q.score);
      est.method = ScoreMethod::kQuadrature;
      return est;
    }
    default:
      return marginal_score_snis(*this, lambda, x, options);
  }
}

Matrix DiffusionPath::marginal_hessian_at(double lambda, const Vector& x, const ScoreOptions& options) const {
  if (x.size() != dim()) fail(ErrorCode::kDimensionMismatch, "point dimension differs from path dimension");
  if (auto cf = closed_form_marginal(lambda)) return cf->hessian_log_density(x);
  if (dim() == 1) return Matrix::Constant(1, 1, marginal_quadrature_1d(*this, lambda, x(0), true).hessian);
  Matrix h;
  marginal_score_snis(*this, lambda, x, options, &h);
  return h;
}

Matrix DiffusionPath::sample_marginal_at(double lambda, std::size_t n, std::uint64_t seed) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kDomain, "lambda must lie in [0, 1]");
  const Matrix xs = target_->sample(n, derive_seed(seed, 1));
  const Matrix zs = base_.distribution()->sample(n, derive_seed(seed, 2));
  return std::sqrt(lambda) * xs + std::sqrt(1.0 - lambda) * zs;
}

}  // namespace dalmc
