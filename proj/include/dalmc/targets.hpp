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

#ifndef DALMC_TARGETS_HPP
#define DALMC_TARGETS_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dalmc/common.hpp"

namespace dalmc {

class Component;

// Hessian decay: -I/(a1 + a2|x-mu|^2) <= Hess V <= I/(b1 + b2|x-mu|^2) for |x-mu| > r.
struct HessianDecay {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double r = 0.0;
};

// X = U + G with |U - c|^2 <= spread2 and G ~ N(0, tau2 I). For anisotropic
// G, tau2 and tau2_max are the extreme eigenvalues of its covariance.
struct CompactGaussianForm {
  double tau2 = 1.0;
  double spread2 = 0.0;
  std::optional<double> tau2_max;
};

// X = U + G with G ~ t(0, tau2 I, alpha).
struct CompactStudentForm {
  double tau2 = 1.0;
  double alpha = 3.0;
};

struct SmoothnessConstants {
  std::optional<double> L_pi;
  std::optional<double> M_pi;
  std::optional<double> r;
  std::optional<double> C_pi;  // sup |score|^2 style constant used by the heavy-tailed bound
  std::optional<HessianDecay> decay;
  std::optional<CompactGaussianForm> compact_gaussian;
  std::optional<CompactStudentForm> compact_student;
};

class Target {
 public:
  virtual ~Target();

  int dim() const { return dim_; }
  virtual std::string kind() const = 0;

  double log_density(const Vector& x) const;
  double density(const Vector& x) const;
  Vector score(const Vector& x) const;
  Matrix hessian_log_density(const Vector& x) const;
  // Log density, with optional score and Hessian outputs (resized as needed).
  double evaluate(const Vector& x, Vector* score, Matrix* hessian) const;
  // Log density that returns -inf instead of raising where the density underflows.
  double log_density_or_neg_inf(const Vector& x) const;

  // d x n matrix of exact i.i.d. draws.
  Matrix sample(std::size_t n, std::uint64_t seed) const;
  virtual void sample_into(Rng& rng, Eigen::Ref<Matrix> out) const = 0;

  virtual Vector mean() const = 0;
  virtual Matrix covariance() const = 0;
  double second_moment() const;

  // Law of sqrt(lambda) X + sqrt(1 - lambda) sigma Z, Z ~ N(0, I), when it has a
  // closed form; nullptr otherwise.
  virtual std::shared_ptr<const Target> gaussian_diffused(double lambda, double sigma) const;

  // Constants known in closed form for this family (no sampling involved).
  virtual SmoothnessConstants known_constants() const;

  // Points around which 1D quadrature should split its range.
  virtual std::vector<double> quadrature_breaks() const;

 protected:
  explicit Target(int dim);
  virtual double do_evaluate(const Vector& x, Vector* score, Matrix* hessian) const = 0;

 private:
  int dim_;
};

using TargetPtr = std::shared_ptr<const Target>;

// Finite mixture evaluated in log space.
class MixtureTarget : public Target {
 public:
  MixtureTarget(std::vector<double> weights, std::vector<std::shared_ptr<const Component>> components,
                std::string kind = "mixture");

  std::string kind() const override { return kind_; }
  std::size_t size() const { return components_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  const Component& component(std::size_t i) const { return *components_[i]; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  void sample_into(Rng& rng, Eigen::Ref<Matrix> out) const override;
  Vector mean() const override;
  Matrix covariance() const override;
  std::shared_ptr<const Target> gaussian_diffused(double lambda, double sigma) const override;
  std::vector<double> quadrature_breaks() const override;

 protected:
  double do_evaluate(const Vector& x, Vector* score, Matrix* hessian) const override;

 private:
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<double> cumulative_;
  std::vector<std::shared_ptr<const Component>> components_;
  std::string kind_;
  std::vector<std::string> warnings_;
};

struct GaussianComponentSpec {
  double weight = 1.0;
  Vector mean;
  Matrix covariance;
};

class GaussianMixture final : public MixtureTarget {
 public:
  explicit GaussianMixture(const std::vector<GaussianComponentSpec>& components);
  static GaussianMixture from_precisions(const std::vector<double>& weights, const std::vector<Vector>& means,
                                         const std::vector<Matrix>& precisions);

  std::size_t num_components() const { return means_.size(); }
  double component_weight(std::size_t i) const { return kept_weights_[i]; }
  const Vector& component_mean(std::size_t i) const { return means_[i]; }
  const Matrix& component_covariance(std::size_t i) const { return covariances_[i]; }
  const Matrix& component_precision(std::size_t i) const { return precisions_[i]; }
  bool equal_covariances() const;

  SmoothnessConstants known_constants() const override;

 private:
  struct Parts;
  explicit GaussianMixture(Parts parts);

  std::vector<double> kept_weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  std::vector<Matrix> precisions_;
};

std::shared_ptr<GaussianMixture> make_gaussian(const Vector& mean, const Matrix& covariance);
std::shared_ptr<GaussianMixture> make_gaussian_1d(double mean, double variance);

class StudentT final : public MixtureTarget {
 public:
  StudentT(Vector location, Matrix scale, double dof);
  static std::shared_ptr<StudentT> isotropic(int dim, double sigma, double dof);

  const Vector& location() const { return location_; }
  const Matrix& scale() const { return scale_; }
  double dof() const { return dof_; }

  SmoothnessConstants known_constants() const override;

 private:
  Vector location_;
  Matrix scale_;
  double dof_;
};

// (1 - e^{-m^2/4}) N(m, 1) + e^{-m^2/4} (Uniform[-m, 2m] * N(0, w^2)).
class SmoothedUniformMixture final : public MixtureTarget {
 public:
  explicit SmoothedUniformMixture(double m, double smoothing_width = 1.0);

  double m() const { return m_; }
  double gaussian_weight() const { return gaussian_weight_; }
  double smoothing_width() const { return width_; }
  double support_lo() const { return -m_; }
  double support_hi() const { return 2.0 * m_; }

  SmoothnessConstants known_constants() const override;

 private:
  double m_;
  double gaussian_weight_;
  double width_;
};

enum class NoiseKind { kGaussian, kStudentT };

struct Atom {
  double weight = 1.0;
  Vector location;
};

// Discrete U with |U - m_pi|^2 <= d R^2, plus isotropic Gaussian or Student-t noise.
class CompactPlusNoise final : public MixtureTarget {
 public:
  CompactPlusNoise(std::vector<Atom> atoms, NoiseKind noise, double tau, double noise_dof, double radius,
                   Vector center);

  NoiseKind noise() const { return noise_; }
  double tau() const { return tau_; }
  double noise_dof() const { return noise_dof_; }
  double radius() const { return radius_; }
  const Vector& center() const { return center_; }

  SmoothnessConstants known_constants() const override;

 private:
  NoiseKind noise_;
  double tau_;
  double noise_dof_;
  double radius_;
  Vector center_;
};

struct PairDiagnostic {
  std::size_t i = 0;  // 0-based component indices
  std::size_t j = 0;
  bool zero_set_nonempty = false;
  bool passes = true;
  std::size_t candidates = 0;
  std::size_t rescued_null = 0;        // condition (i)
  std::size_t rescued_mean = 0;        // condition (ii)
  std::size_t rescued_third = 0;       // condition (iii)
  std::string reason;
};

struct SmoothnessReport {
  bool lipschitz_ok = false;
  double L_pi = kInf;
  std::string L_pi_method;
  bool strongly_convex_outside_ball = false;
  double M_pi = 0.0;
  double r = kInf;
  std::string convexity_method;
  std::vector<PairDiagnostic> pairs;
  std::vector<std::pair<std::size_t, std::size_t>> failed_pairs;
  std::optional<double> C_pi;
  std::vector<std::string> warnings;

  SmoothnessConstants known;  // family constants carried along

  SmoothnessConstants constants() const;
};

SmoothnessReport check_mixture_smoothness(const GaussianMixture& mixture, std::uint64_t seed = 0);
SmoothnessReport analyze_smoothness(const Target& target, std::uint64_t seed = 0);

double lsi_constant_bound(double M_pi, double L_pi, double r);

struct KpiEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};
KpiEstimate estimate_K_pi(const Target& target, std::size_t n, std::uint64_t seed);

// Unit directions used for ring/shell scans (d = 1: +-1, d = 2: circle, d >= 3: spiral/random).
Matrix scan_directions(int dim, std::size_t count, std::uint64_t seed);

}  // namespace dalmc

#endif  // DALMC_TARGETS_HPP
