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

#ifndef DALMC_SRC_TARGETS_COMPONENTS_HPP
#define DALMC_SRC_TARGETS_COMPONENTS_HPP

#include <memory>
#include <vector>

#include "dalmc/common.hpp"

namespace dalmc {

class Component {
 public:
  virtual ~Component() = default;
  virtual int dim() const = 0;
  // Log density; score and hessian are filled when non-null (already sized).
  virtual double evaluate(const Vector& x, Vector* score, Matrix* hessian) const = 0;
  virtual void sample(Rng& rng, Eigen::Ref<Vector> out) const = 0;
  virtual Vector mean() const = 0;
  virtual Matrix covariance() const = 0;
  virtual std::shared_ptr<const Component> gaussian_diffused(double lambda, double sigma) const = 0;
  virtual void add_breaks(std::vector<double>& breaks) const = 0;
};

class GaussianComponent final : public Component {
 public:
  GaussianComponent(Vector mean, Matrix covariance);

  int dim() const override { return static_cast<int>(mean_.size()); }
  double evaluate(const Vector& x, Vector* score, Matrix* hessian) const override;
  void sample(Rng& rng, Eigen::Ref<Vector> out) const override;
  Vector mean() const override { return mean_; }
  Matrix covariance() const override { return cov_; }
  std::shared_ptr<const Component> gaussian_diffused(double lambda, double sigma) const override;
  void add_breaks(std::vector<double>& breaks) const override;

  const Matrix& precision() const { return prec_; }

 private:
  Vector mean_;
  Matrix cov_;
  Matrix prec_;
  Matrix chol_;
  double log_norm_;
};

class StudentTComponent final : public Component {
 public:
  StudentTComponent(Vector location, Matrix scale, double dof);

  int dim() const override { return static_cast<int>(loc_.size()); }
  double evaluate(const Vector& x, Vector* score, Matrix* hessian) const override;
  void sample(Rng& rng, Eigen::Ref<Vector> out) const override;
  Vector mean() const override { return loc_; }
  Matrix covariance() const override { return scale_ * (dof_ / (dof_ - 2.0)); }
  std::shared_ptr<const Component> gaussian_diffused(double, double) const override { return nullptr; }
  void add_breaks(std::vector<double>& breaks) const override;

  const Matrix& precision() const { return prec_; }
  double dof() const { return dof_; }

 private:
  Vector loc_;
  Matrix scale_;
  Matrix prec_;
  Matrix chol_;
  double dof_;
  double log_norm_;
};

// Uniform[a, b] convolved with N(0, w^2), one dimension.
class SmoothedUniformComponent final : public Component {
 public:
  SmoothedUniformComponent(double a, double b, double width);

  int dim() const override { return 1; }
  double evaluate(const Vector& x, Vector* score, Matrix* hessian) const override;
  void sample(Rng& rng, Eigen::Ref<Vector> out) const override;
  Vector mean() const override;
  Matrix covariance() const override;
  std::shared_ptr<const Component> gaussian_diffused(double lambda, double sigma) const override;
  void add_breaks(std::vector<double>& breaks) const override;

 private:
  double a_;
  double b_;
  double w_;
  double log_len_;
};

Matrix checked_cholesky(const Matrix& spd, const char* what);

}  // namespace dalmc

#endif  // DALMC_SRC_TARGETS_COMPONENTS_HPP
