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
#include <numeric>

#include "dalmc/targets.hpp"
#include "targets/components.hpp"

namespace dalmc {

Target::Target(int dim) : dim_(dim) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "target dimension must be at least 1");
}

Target::~Target() = default;

double Target::evaluate(const Vector& x, Vector* score, Matrix* hessian) const {
  if (x.size() != dim_) {
    fail(ErrorCode::kDimensionMismatch,
         "point has dimension " + std::to_string(x.size()) + ", target has " + std::to_string(dim_));
  }
  if (score) score->resize(dim_);
  if (hessian) hessian->resize(dim_, dim_);
  const double lp = do_evaluate(x, score, hessian);
  if (!(lp > -kInf)) fail(ErrorCode::kDomain, "evaluation at a point of zero density");
  return lp;
}

double Target::log_density_or_neg_inf(const Vector& x) const {
  if (x.size() != dim_) fail(ErrorCode::kDimensionMismatch, "point dimension differs from target dimension");
  const double lp = do_evaluate(x, nullptr, nullptr);
  return std::isnan(lp) ? -kInf : lp;
}

double Target::log_density(const Vector& x) const { return evaluate(x, nullptr, nullptr); }
double Target::density(const Vector& x) const { return std::exp(log_density(x)); }

Vector Target::score(const Vector& x) const {
  Vector s;
  evaluate(x, &s, nullptr);
  return s;
}

Matrix Target::hessian_log_density(const Vector& x) const {
  Matrix h;
  evaluate(x, nullptr, &h);
  return h;
}

Matrix Target::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  Matrix out(dim_, static_cast<Eigen::Index>(n));
  Rng rng = make_rng(seed);
  sample_into(rng, out);
  return out;
}

double Target::second_moment() const {
  const Vector m = mean();
  return covariance().trace() + m.squaredNorm();
}

std::shared_ptr<const Target> Target::gaussian_diffused(double, double) const { return nullptr; }
SmoothnessConstants Target::known_constants() const { return {}; }
std::vector<double> Target::quadrature_breaks() const { return {}; }

// ---------------------------------------------------------------- MixtureTarget

namespace {
int first_dim(const std::vector<std::shared_ptr<const Component>>& comps) {
  if (comps.empty()) fail(ErrorCode::kInvalidArgument, "mixture needs at least one component");
  return comps.front()->dim();
}
}  // namespace

MixtureTarget::MixtureTarget(std::vector<double> weights, std::vector<std::shared_ptr<const Component>> components,
                             std::string kind)
    : Target(first_dim(components)), kind_(std::move(kind)) {
  if (weights.size() != components.size()) fail(ErrorCode::kInvalidArgument, "weights and components differ in count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::kInvalidArgument, "mixture weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorCode::kInvalidArgument, "mixture weights must sum to 1");
  double kept = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (components[i]->dim() != dim()) fail(ErrorCode::kDimensionMismatch, "mixture components differ in dimension");
    if (weights[i] < 1e-12) {
      warnings_.push_back("dropped component " + std::to_string(i + 1) + " with weight below 1e-12");
      continue;
    }
    weights_.push_back(weights[i]);
    components_.push_back(components[i]);
    kept += weights[i];
  }
  if (components_.empty()) fail(ErrorCode::kInvalidArgument, "all mixture components are degenerate");
  double acc = 0.0;
  for (double& w : weights_) {
    w /= kept;
    log_weights_.push_back(std::log(w));
    acc += w;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

double MixtureTarget::do_evaluate(const Vector& x, Vector* score, Matrix* hessian) const {
  const std::size_t k = components_.size();
  if (k == 1) return components_[0]->evaluate(x, score, hessian);

  const int d = dim();
  thread_local std::vector<double> logs;
  thread_local std::vector<Vector> grads;
  thread_local std::vector<Matrix> hess;
  logs.resize(k);
  const bool need_grad = score || hessian;
  if (need_grad) {
    grads.resize(k);
    for (auto& g : grads) g.resize(d);
  }
  if (hessian) {
    hess.resize(k);
    for (auto& h : hess) h.resize(d, d);
  }
  double mx = -kInf;
  for (std::size_t i = 0; i < k; ++i) {
    logs[i] = log_weights_[i] + components_[i]->evaluate(x, need_grad ? &grads[i] : nullptr, hessian ? &hess[i] : nullptr);
    mx = std::max(mx, logs[i]);
  }
  if (!(mx > -kInf)) return -kInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    logs[i] = std::exp(logs[i] - mx);
    sum += logs[i];
  }
  for (std::size_t i = 0; i < k; ++i) logs[i] /= sum;  // responsibilities
  if (need_grad) {
    Vector s = Vector::Zero(d);
    for (std::size_t i = 0; i < k; ++i) s += logs[i] * grads[i];
    if (hessian) {
      hessian->setZero();
      for (std::size_t i = 0; i < k; ++i) {
        const Vector c = grads[i] - s;
        hessian->noalias() += logs[i] * (hess[i] + c * c.transpose());
      }
    }
    if (score) *score = s;
  }
  return mx + std::log(sum);
}

void MixtureTarget::sample_into(Rng& rng, Eigen::Ref<Matrix> out) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    std::size_t idx = 0;
    if (components_.size() > 1) {
      const double u = unif(rng);
      idx = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
      idx = std::min(idx, components_.size() - 1);
    }
    components_[idx]->sample(rng, out.col(j));
  }
}

Vector MixtureTarget::mean() const {
  Vector m = Vector::Zero(dim());
  for (std::size_t i = 0; i < components_.size(); ++i) m += weights_[i] * components_[i]->mean();
  return m;
}

Matrix MixtureTarget::covariance() const {
  const Vector m = mean();
  Matrix c = Matrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const Vector mi = components_[i]->mean() - m;
    c += weights_[i] * (components_[i]->covariance() + mi * mi.transpose());
  }
  return c;
}

std::shared_ptr<const Target> MixtureTarget::gaussian_diffused(double lambda, double sigma) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kDomain, "lambda must lie in [0, 1]");
  std::vector<std::shared_ptr<const Component>> comps;
  for (const auto& c : components_) {
    auto dc = c->gaussian_diffused(lambda, sigma);
    if (!dc) return nullptr;
    comps.push_back(std::move(dc));
  }
  return std::make_shared<MixtureTarget>(weights_, std::move(comps), "diffused_mixture");
}

std::vector<double> MixtureTarget::quadrature_breaks() const {
  std::vector<double> b;
  if (dim() != 1) return b;
  for (const auto& c : components_) c->add_breaks(b);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace dalmc
