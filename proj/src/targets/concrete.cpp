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

#include "dalmc/targets.hpp"
#include "targets/components.hpp"

namespace dalmc {

namespace {

std::pair<double, double> sym_eig_range(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

bool is_isotropic(const Matrix& m, double* scale) {
  const double s = m(0, 0);
  const Matrix iso = s * Matrix::Identity(m.rows(), m.cols());
  if ((m - iso).norm() > 1e-12 * std::abs(s)) return false;
  *scale = s;
  return true;
}

}  // namespace

// ---------------------------------------------------------------- GaussianMixture

struct GaussianMixture::Parts {
  std::vector<double> weights;
  std::vector<std::shared_ptr<const Component>> comps;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  std::vector<Matrix> precs;
};

namespace {

std::shared_ptr<const GaussianComponent> make_component(const Vector& mean, const Matrix& cov, std::size_t index) {
  try {
    return std::make_shared<GaussianComponent>(mean, cov);
  } catch (const Error& e) {
    fail(e.code(), "component " + std::to_string(index + 1) + ": " + e.what());
  }
}

}  // namespace

GaussianMixture::GaussianMixture(const std::vector<GaussianComponentSpec>& components)
    : GaussianMixture([&] {
        Parts p;
        for (std::size_t i = 0; i < components.size(); ++i) {
          const auto& c = components[i];
          auto comp = make_component(c.mean, c.covariance, i);
          p.weights.push_back(c.weight);
          p.means.push_back(c.mean);
          p.covs.push_back(c.covariance);
          p.precs.push_back(comp->precision());
          p.comps.push_back(std::move(comp));
        }
        return p;
      }()) {}

GaussianMixture::GaussianMixture(Parts parts)
    : MixtureTarget(parts.weights, parts.comps, "gaussian_mixture") {
  double kept = 0.0;
  for (std::size_t i = 0; i < parts.weights.size(); ++i) {
    if (parts.weights[i] < 1e-12) continue;
    kept_weights_.push_back(parts.weights[i]);
    means_.push_back(parts.means[i]);
    covariances_.push_back(parts.covs[i]);
    precisions_.push_back(parts.precs[i]);
    kept += parts.weights[i];
  }
  for (double& w : kept_weights_) w /= kept;
}

GaussianMixture GaussianMixture::from_precisions(const std::vector<double>& weights, const std::vector<Vector>& means,
                                                 const std::vector<Matrix>& precisions) {
  if (weights.size() != means.size() || weights.size() != precisions.size()) {
    fail(ErrorCode::kInvalidArgument, "weights, means and precisions differ in count");
  }
  std::vector<GaussianComponentSpec> specs;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    checked_cholesky(precisions[i], "precision matrix");
    Matrix cov = precisions[i].llt().solve(Matrix::Identity(precisions[i].rows(), precisions[i].cols()));
    cov = 0.5 * (cov + cov.transpose());
    specs.push_back({weights[i], means[i], cov});
  }
  return GaussianMixture(specs);
}

bool GaussianMixture::equal_covariances() const {
  for (std::size_t i = 1; i < covariances_.size(); ++i) {
    if ((covariances_[i] - covariances_[0]).norm() > 1e-12 * covariances_[0].norm()) return false;
  }
  return true;
}

SmoothnessConstants GaussianMixture::known_constants() const {
  SmoothnessConstants c;
  if (!equal_covariances()) return c;
  const Matrix& p = precisions_[0];
  const auto [pmin, pmax] = sym_eig_range(p);
  double spread = 0.0;  // largest |P(mu_i - mu_j)|
  for (std::size_t i = 0; i < means_.size(); ++i) {
    for (std::size_t j = i + 1; j < means_.size(); ++j) spread = std::max(spread, (p * (means_[i] - means_[j])).norm());
  }
  // Hess log pi = -P + Cov_r(P mu_i), and the covariance term is at most spread^2/4.
  const double upper = 0.25 * spread * spread - pmin;
  c.L_pi = std::max(pmax, std::abs(upper));
  if (-upper > 0.0) {
    c.M_pi = -upper;
    c.r = 0.0;
  }
  const Vector m = mean();
  double spread2 = 0.0;
  for (const auto& mu : means_) spread2 = std::max(spread2, (mu - m).squaredNorm());
  double tau2 = 0.0;
  if (is_isotropic(covariances_[0], &tau2)) {
    c.compact_gaussian = CompactGaussianForm{tau2, spread2, std::nullopt};
  } else {
    c.compact_gaussian = CompactGaussianForm{1.0 / pmax, spread2, 1.0 / pmin};
  }
  return c;
}

std::shared_ptr<GaussianMixture> make_gaussian(const Vector& mean, const Matrix& covariance) {
  return std::make_shared<GaussianMixture>(std::vector<GaussianComponentSpec>{{1.0, mean, covariance}});
}

std::shared_ptr<GaussianMixture> make_gaussian_1d(double mean, double variance) {
  return make_gaussian(Vector::Constant(1, mean), Matrix::Constant(1, 1, variance));
}

// ---------------------------------------------------------------- StudentT

StudentT::StudentT(Vector location, Matrix scale, double dof)
    : MixtureTarget({1.0}, {std::make_shared<StudentTComponent>(location, scale, dof)}, "student_t"),
      location_(std::move(location)),
      scale_(std::move(scale)),
      dof_(dof) {}

std::shared_ptr<StudentT> StudentT::isotropic(int dim, double sigma, double dof) {
  if (!(sigma > 0.0)) fail(ErrorCode::kInvalidArgument, "Student-t scale must be positive");
  return std::make_shared<StudentT>(Vector::Zero(dim), sigma * sigma * Matrix::Identity(dim, dim), dof);
}

SmoothnessConstants StudentT::known_constants() const {
  SmoothnessConstants c;
  const double d = static_cast<double>(dim());
  const double a = dof_;
  const Matrix p = static_cast<const StudentTComponent&>(component(0)).precision();
  const auto [pmin, pmax] = sym_eig_range(p);
  c.L_pi = (a + d) * pmax / a;
  c.C_pi = (a + d) * (a + d) * pmax / (4.0 * a);
  const double lower = 2.0 * (a + d) * pmax * pmax / pmin;
  const double upper = (a + d) * pmax;
  c.decay = HessianDecay{a / lower, pmin / lower, a / upper, pmin / upper, 0.0};
  double tau2 = 0.0;
  if (is_isotropic(scale_, &tau2)) c.compact_student = CompactStudentForm{tau2, a};
  return c;
}

// ---------------------------------------------------------------- SmoothedUniformMixture

namespace {
double checked_m(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorCode::kInvalidArgument, "m must be positive and finite");
  return m;
}
}  // namespace

SmoothedUniformMixture::SmoothedUniformMixture(double m, double smoothing_width)
    : MixtureTarget({1.0 - std::exp(-0.25 * checked_m(m) * m), std::exp(-0.25 * m * m)},
                    {std::make_shared<GaussianComponent>(Vector::Constant(1, m), Matrix::Constant(1, 1, 1.0)),
                     std::make_shared<SmoothedUniformComponent>(-m, 2.0 * m, smoothing_width)},
                    "smoothed_uniform_mixture"),
      m_(m),
      gaussian_weight_(1.0 - std::exp(-0.25 * m * m)),
      width_(smoothing_width) {}

SmoothnessConstants SmoothedUniformMixture::known_constants() const {
  SmoothnessConstants c;
  if (std::abs(width_ - 1.0) > 1e-15) return c;
  // Both parts share unit Gaussian noise over atoms supported in [-m, 2m].
  const double spread2 = 2.25 * m_ * m_;
  c.compact_gaussian = CompactGaussianForm{1.0, spread2, std::nullopt};
  c.L_pi = std::max(1.0, std::abs(1.0 - spread2));
  return c;
}

// ---------------------------------------------------------------- CompactPlusNoise

namespace {

std::vector<std::shared_ptr<const Component>> compact_components(const std::vector<Atom>& atoms, NoiseKind noise,
                                                                 double tau, double dof, double radius,
                                                                 const Vector& center) {
  if (atoms.empty()) fail(ErrorCode::kInvalidArgument, "compact part needs at least one atom");
  if (!(tau > 0.0)) fail(ErrorCode::kInvalidArgument, "noise scale tau must be positive");
  if (!(radius >= 0.0)) fail(ErrorCode::kInvalidArgument, "radius must be nonnegative");
  const auto d = center.size();
  std::vector<std::shared_ptr<const Component>> comps;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (a.location.size() != d) fail(ErrorCode::kDimensionMismatch, "atom dimension differs from center");
    const double dist2 = (a.location - center).squaredNorm();
    if (dist2 > static_cast<double>(d) * radius * radius * (1.0 + 1e-12)) {
      fail(ErrorCode::kInvalidArgument, "atom " + std::to_string(i + 1) + " violates |U - m|^2 <= d R^2");
    }
    const Matrix cov = tau * tau * Matrix::Identity(d, d);
    if (noise == NoiseKind::kGaussian) {
      comps.push_back(std::make_shared<GaussianComponent>(a.location, cov));
    } else {
      comps.push_back(std::make_shared<StudentTComponent>(a.location, cov, dof));
    }
  }
  return comps;
}

std::vector<double> atom_weights(const std::vector<Atom>& atoms) {
  std::vector<double> w;
  for (const auto& a : atoms) w.push_back(a.weight);
  return w;
}

}  // namespace

CompactPlusNoise::CompactPlusNoise(std::vector<Atom> atoms, NoiseKind noise, double tau, double noise_dof,
                                   double radius, Vector center)
    : MixtureTarget(atom_weights(atoms), compact_components(atoms, noise, tau, noise_dof, radius, center),
                    "compact_plus_noise"),
      noise_(noise),
      tau_(tau),
      noise_dof_(noise_dof),
      radius_(radius),
      center_(std::move(center)) {}

SmoothnessConstants CompactPlusNoise::known_constants() const {
  SmoothnessConstants c;
  const double d = static_cast<double>(dim());
  const double t2 = tau_ * tau_;
  if (noise_ == NoiseKind::kGaussian) {
    const double spread2 = d * radius_ * radius_;
    c.compact_gaussian = CompactGaussianForm{t2, spread2, std::nullopt};
    c.L_pi = std::max(1.0 / t2, std::abs(1.0 / t2 - spread2 / (t2 * t2)));
  } else {
    const double a = noise_dof_;
    c.compact_student = CompactStudentForm{t2, a};
    c.C_pi = (a + d) * (a + d) / (2.0 * a * t2);
    c.L_pi = (a + d) / (a * t2) + *c.C_pi;
  }
  return c;
}

}  // namespace dalmc
