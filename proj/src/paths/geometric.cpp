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

#include <algorithm>
#include <cmath>

#include "dalmc/paths.hpp"

namespace dalmc {

GeometricPath::GeometricPath(TargetPtr base, TargetPtr target, Schedule schedule)
    : base_(std::move(base)), target_(std::move(target)), schedule_(std::move(schedule)) {
  if (!base_ || !target_) fail(ErrorCode::kInvalidArgument, "geometric path needs a base and a target");
  if (base_->dim() != target_->dim()) fail(ErrorCode::kDimensionMismatch, "base and target dimensions differ");
}

double GeometricPath::unnormalized_log_density(double lambda, const Vector& x) const {
  const double lb = base_->log_density_or_neg_inf(x);
  const double lt = target_->log_density_or_neg_inf(x);
  if (lambda <= 0.0) return lb;
  if (lambda >= 1.0) return lt;
  return (1.0 - lambda) * lb + lambda * lt;
}

Vector GeometricPath::score(double lambda, const Vector& x) const {
  if (lambda <= 0.0) return base_->score(x);
  if (lambda >= 1.0) return target_->score(x);
  return (1.0 - lambda) * base_->score(x) + lambda * target_->score(x);
}

std::vector<double> GeometricPath::normalized_density_on_grid(double lambda, const std::vector<double>& grid) const {
  if (base_->dim() != 1) fail(ErrorCode::kInvalidArgument, "grid normalisation needs a one-dimensional path");
  if (grid.size() < 2) fail(ErrorCode::kInvalidArgument, "grid needs at least two points");
  std::vector<double> lp(grid.size());
  double lmax = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lp[i] = unnormalized_log_density(lambda, Vector::Constant(1, grid[i]));
    lmax = std::max(lmax, lp[i]);
  }
  if (!std::isfinite(lmax)) fail(ErrorCode::kDomain, "geometric path density vanishes on the whole grid");
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = std::exp(lp[i] - lmax);
  double z = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) z += 0.5 * (out[i] + out[i + 1]) * (grid[i + 1] - grid[i]);
  if (!(z > 0.0)) fail(ErrorCode::kNumerical, "grid normalising constant is not positive");
  for (double& v : out) v /= z;
  return out;
}

Vector geometric_score(const GeometricPath& path, double lambda, const Vector& x) { return path.score(lambda, x); }

}  // namespace dalmc
