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

namespace dalmc {

BaseDistribution::BaseDistribution(BaseKind kind, int dim, double sigma, double alpha)
    : kind_(kind), dim_(dim), sigma_(sigma), alpha_(alpha) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "base dimension must be at least 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorCode::kInvalidArgument, "base sigma must be positive");
  if (kind == BaseKind::kStudentT && !(alpha > 2.0)) fail(ErrorCode::kInvalidArgument, "base alpha must exceed 2");
}

BaseDistribution BaseDistribution::gaussian(int dim, double sigma) {
  return BaseDistribution(BaseKind::kGaussian, dim, sigma, kInf);
}

BaseDistribution BaseDistribution::student_t(int dim, double sigma, double alpha) {
  return BaseDistribution(BaseKind::kStudentT, dim, sigma, alpha);
}

std::string BaseDistribution::name() const { return heavy_tailed() ? "student_t" : "gaussian"; }

TargetPtr BaseDistribution::kernel(double variance_factor) const {
  const Matrix cov = variance_factor * sigma_ * sigma_ * Matrix::Identity(dim_, dim_);
  if (heavy_tailed()) return std::make_shared<StudentT>(Vector::Zero(dim_), cov, alpha_);
  return make_gaussian(Vector::Zero(dim_), cov);
}

double BaseDistribution::noise_second_moment() const {
  const double base = sigma_ * sigma_ * dim_;
  return heavy_tailed() ? base * alpha_ / (alpha_ - 2.0) : base;
}

double BaseDistribution::lipschitz() const {
  if (heavy_tailed()) return (alpha_ + dim_) / (alpha_ * sigma_ * sigma_);
  return 1.0 / (sigma_ * sigma_);
}

}  // namespace dalmc
