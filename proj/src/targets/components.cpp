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

#include "targets/components.hpp"

#include <cmath>
#include <numbers>

#include "numeric.hpp"

namespace dalmc {

Matrix checked_cholesky(const Matrix& spd, const char* what) {
  if (spd.rows() != spd.cols() || spd.rows() == 0) fail(ErrorCode::kInvalidArgument, std::string(what) + " must be square");
  if (!spd.isApprox(spd.transpose(), 1e-12)) fail(ErrorCode::kInvalidArgument, std::string(what) + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(spd, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0)) fail(ErrorCode::kInvalidArgument, std::string(what) + " is not positive definite");
  Eigen::LLT<Matrix> llt(spd);
  if (llt.info() != Eigen::Success) fail(ErrorCode::kInvalidArgument, std::string(what) + " is not positive definite");
  return llt.matrixL();
}

namespace {
double log_det_from_chol(const Matrix& l) { return 2.0 * l.diagonal().array().log().sum(); }
}  // namespace

// ---------------------------------------------------------------- Gaussian

GaussianComponent::GaussianComponent(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  if (cov_.rows() != mean_.size()) fail(ErrorCode::kDimensionMismatch, "covariance and mean dimensions differ");
  chol_ = checked_cholesky(cov_, "covariance");
  prec_ = cov_.llt().solve(Matrix::Identity(cov_.rows(), cov_.cols()));
  prec_ = 0.5 * (prec_ + prec_.transpose());
  log_norm_ = -0.5 * static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_from_chol(chol_);
}

double GaussianComponent::evaluate(const Vector& x, Vector* score, Matrix* hessian) const {
  if (mean_.size() == 1) {
    const double y = x(0) - mean_(0);
    const double p = prec_(0, 0);
    if (score) (*score)(0) = -p * y;
    if (hessian) (*hessian)(0, 0) = -p;
    return log_norm_ - 0.5 * p * y * y;
  }
  const Vector y = x - mean_;
  const Vector py = prec_ * y;
  if (score) *score = -py;
  if (hessian) *hessian = -prec_;
  return log_norm_ - 0.5 * y.dot(py);
}

void GaussianComponent::sample(Rng& rng, Eigen::Ref<Vector> out) const {
  std::normal_distribution<double> normal;
  Vector z(mean_.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(rng);
  out = mean_ + chol_ * z;
}

std::shared_ptr<const Component> GaussianComponent::gaussian_diffused(double lambda, double sigma) const {
  const auto d = mean_.size();
  Matrix cov = lambda * cov_ + (1.0 - lambda) * sigma * sigma * Matrix::Identity(d, d);
  return std::make_shared<GaussianComponent>(std::sqrt(lambda) * mean_, cov);
}

void GaussianComponent::add_breaks(std::vector<double>& breaks) const {
  if (mean_.size() != 1) return;
  const double s = std::sqrt(cov_(0, 0));
  for (double k : {-8.0, -3.0, 0.0, 3.0, 8.0}) breaks.push_back(mean_(0) + k * s);
}

// ---------------------------------------------------------------- Student t

StudentTComponent::StudentTComponent(Vector location, Matrix scale, double dof)
    : loc_(std::move(location)), scale_(std::move(scale)), dof_(dof) {
  if (!(dof_ > 2.0)) fail(ErrorCode::kInvalidArgument, "Student-t dof must exceed 2");
  if (scale_.rows() != loc_.size()) fail(ErrorCode::kDimensionMismatch, "scale and location dimensions differ");
  chol_ = checked_cholesky(scale_, "scale matrix");
  prec_ = scale_.llt().solve(Matrix::Identity(scale_.rows(), scale_.cols()));
  prec_ = 0.5 * (prec_ + prec_.transpose());
  const double d = static_cast<double>(loc_.size());
  log_norm_ = std::lgamma(0.5 * (dof_ + d)) - std::lgamma(0.5 * dof_) - 0.5 * d * std::log(dof_ * std::numbers::pi) -
              0.5 * log_det_from_chol(chol_);
}

double StudentTComponent::evaluate(const Vector& x, Vector* score, Matrix* hessian) const {
  const double d = static_cast<double>(loc_.size());
  const double a = dof_;
  if (loc_.size() == 1) {
    const double y = x(0) - loc_(0);
    const double p = prec_(0, 0);
    const double q = p * y * y;
    const double c = (a + d) / (a + q);
    if (score) (*score)(0) = -c * p * y;
    if (hessian) (*hessian)(0, 0) = -c * p + 2.0 * c / (a + q) * (p * y) * (p * y);
    return log_norm_ - 0.5 * (a + d) * std::log1p(q / a);
  }
  const Vector y = x - loc_;
  const Vector py = prec_ * y;
  const double q = y.dot(py);
  const double c = (a + d) / (a + q);
  if (score) *score = -c * py;
  if (hessian) *hessian = -c * prec_ + (2.0 * c / (a + q)) * (py * py.transpose());
  return log_norm_ - 0.5 * (a + d) * std::log1p(q / a);
}

void StudentTComponent::sample(Rng& rng, Eigen::Ref<Vector> out) const {
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma(0.5 * dof_, 2.0);
  Vector z(loc_.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal(rng);
  const double chi2 = gamma(rng);
  out = loc_ + chol_ * z * std::sqrt(dof_ / chi2);
}

void StudentTComponent::add_breaks(std::vector<double>& breaks) const {
  if (loc_.size() != 1) return;
  const double s = std::sqrt(scale_(0, 0));
  for (double k : {-30.0, -8.0, -3.0, 0.0, 3.0, 8.0, 30.0}) breaks.push_back(loc_(0) + k * s);
}

// ---------------------------------------------------------------- smoothed uniform

SmoothedUniformComponent::SmoothedUniformComponent(double a, double b, double width) : a_(a), b_(b), w_(width) {
  if (!(b_ > a_)) fail(ErrorCode::kInvalidArgument, "smoothed uniform needs a < b");
  if (!(w_ > 0.0)) fail(ErrorCode::kInvalidArgument, "smoothing width must be positive");
  log_len_ = std::log(b_ - a_);
}

double SmoothedUniformComponent::evaluate(const Vector& x, Vector* score, Matrix* hessian) const {
  const double za = (x(0) - a_) / w_;
  const double zb = (x(0) - b_) / w_;
  const double log_mass = num::log_diff_ndtr(za, zb);
  if (score || hessian) {
    const double ra = std::exp(num::log_normal_pdf(za) - log_mass);
    const double rb = std::exp(num::log_normal_pdf(zb) - log_mass);
    const double s = (ra - rb) / w_;
    if (score) (*score)(0) = s;
    if (hessian) (*hessian)(0, 0) = (-za * ra + zb * rb) / (w_ * w_) - s * s;
  }
  return log_mass - log_len_;
}

void SmoothedUniformComponent::sample(Rng& rng, Eigen::Ref<Vector> out) const {
  std::uniform_real_distribution<double> unif(a_, b_);
  std::normal_distribution<double> normal;
  const double u = unif(rng);
  out(0) = u + w_ * normal(rng);
}

Vector SmoothedUniformComponent::mean() const { return Vector::Constant(1, 0.5 * (a_ + b_)); }

Matrix SmoothedUniformComponent::covariance() const {
  return Matrix::Constant(1, 1, (b_ - a_) * (b_ - a_) / 12.0 + w_ * w_);
}

std::shared_ptr<const Component> SmoothedUniformComponent::gaussian_diffused(double lambda, double sigma) const {
  const double sl = std::sqrt(lambda);
  const double width = std::sqrt(lambda * w_ * w_ + (1.0 - lambda) * sigma * sigma);
  if (sl * (b_ - a_) < 1e-12 * width) {
    return std::make_shared<GaussianComponent>(Vector::Constant(1, 0.5 * sl * (a_ + b_)),
                                               Matrix::Constant(1, 1, width * width));
  }
  return std::make_shared<SmoothedUniformComponent>(sl * a_, sl * b_, width);
}

void SmoothedUniformComponent::add_breaks(std::vector<double>& breaks) const {
  for (double k : {-8.0, -3.0, 0.0, 3.0}) breaks.push_back(a_ + k * w_);
  breaks.push_back(0.5 * (a_ + b_));
  for (double k : {-3.0, 0.0, 3.0, 8.0}) breaks.push_back(b_ + k * w_);
}

}  // namespace dalmc
