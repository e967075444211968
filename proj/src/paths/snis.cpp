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
#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "dalmc/paths.hpp"
#include "numeric.hpp"

namespace dalmc {

namespace {

// Posterior over y = sqrt(lambda) X given the noisy point x:
//   rho(y) ~ pi(y / sqrt(lambda)) K(x - y),
// with K the noise kernel of scale sigma^2 (1 - lambda). The proposal is an even
// mixture of K(x - .) and a Cauchy centred on the scaled target mean, which keeps
// the weights bounded by twice the scaled target density.
class Posterior {
 public:
  Posterior(const DiffusionPath& path, double lambda, const Vector& x)
      : target_(path.target()), x_(x), d_(path.dim()), sl_(std::sqrt(lambda)) {
    const BaseDistribution& base = path.base();
    v_ = base.sigma() * base.sigma() * (1.0 - lambda);
    student_ = base.heavy_tailed();
    a_ = base.alpha();
    const double dd = d_;
    if (student_) {
      k_norm_ = std::lgamma(0.5 * (a_ + dd)) - std::lgamma(0.5 * a_) - 0.5 * dd * std::log(a_ * std::numbers::pi * v_);
    } else {
      k_norm_ = -0.5 * dd * std::log(2.0 * std::numbers::pi * v_);
    }
    Vector mean = Vector::Zero(d_);
    Matrix cov = Matrix::Identity(d_, d_);
    try {
      mean = target_.mean();
      cov = target_.covariance();
    } catch (const Error&) {
    }
    if (!mean.allFinite() || !cov.allFinite()) {
      mean.setZero();
      cov.setIdentity();
    }
    w_loc_ = sl_ * mean;
    Eigen::LLT<Matrix> llt(lambda * cov);
    if (llt.info() != Eigen::Success) llt.compute(lambda * Matrix::Identity(d_, d_));
    w_chol_ = llt.matrixL();
    w_logdet_half_ = w_chol_.diagonal().array().log().sum();
    w_norm_ = std::lgamma(0.5 * (1.0 + dd)) - std::lgamma(0.5) - 0.5 * dd * std::log(std::numbers::pi) - w_logdet_half_;
  }

  int dim() const { return d_; }
  double kernel_var() const { return v_; }
  bool student() const { return student_; }
  double alpha() const { return a_; }
  const Vector& x() const { return x_; }
  const Vector& cauchy_loc() const { return w_loc_; }
  const Matrix& cauchy_chol() const { return w_chol_; }

  // Log kernel at z = x - y, with gradient (w.r.t. x) and Hessian outputs.
  double log_kernel(const Vector& z, Vector* g, Matrix* h) const {
    const double q = z.squaredNorm() / v_;
    if (!student_) {
      if (g) *g = -z / v_;
      if (h) *h = -Matrix::Identity(d_, d_) / v_;
      return k_norm_ - 0.5 * q;
    }
    const double c = (a_ + d_) / (a_ + q);
    if (g) *g = -c * z / v_;
    if (h) *h = -c / v_ * Matrix::Identity(d_, d_) + (2.0 * c / (a_ + q)) * (z / v_) * (z / v_).transpose();
    return k_norm_ - 0.5 * (a_ + d_) * std::log1p(q / a_);
  }

  double log_cauchy(const Vector& y) const {
    const Vector r = w_chol_.triangularView<Eigen::Lower>().solve(y - w_loc_);
    return w_norm_ - 0.5 * (1.0 + d_) * std::log1p(r.squaredNorm());
  }

  double log_target(const Vector& y) const { return target_.log_density_or_neg_inf(y / sl_); }

 private:
  const Target& target_;
  Vector x_;
  int d_;
  double sl_;
  double v_ = 1.0;
  bool student_ = false;
  double a_ = kInf;
  double k_norm_ = 0.0;
  Vector w_loc_;
  Matrix w_chol_;
  double w_logdet_half_ = 0.0;
  double w_norm_ = 0.0;
};

struct Round {
  Vector score;
  Matrix hessian;
  double ess = 0.0;
};

// Golden-ratio Kronecker points with a random shift, mapped through the
// composite inverse CDF of the 1D proposal.
void draw_1d(const Posterior& post, std::size_t n, std::uint64_t seed, std::vector<double>& ys) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double shift = unif(rng);
  const double scale = std::sqrt(post.kernel_var());
  const double c_loc = post.cauchy_loc()(0);
  const double c_scale = post.cauchy_chol()(0, 0);
  const boost::math::normal_distribution<double> normal;
  std::optional<boost::math::students_t_distribution<double>> tdist;
  if (post.student()) tdist.emplace(post.alpha());
  ys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = std::fmod(shift + static_cast<double>(i + 1) * phi, 1.0);
    u = std::clamp(u, 1e-300, 1.0 - 1e-16);
    if (u < 0.5) {
      const double p = std::clamp(2.0 * u, 1e-300, 1.0 - 1e-16);
      const double z = tdist ? boost::math::quantile(*tdist, p) : boost::math::quantile(normal, p);
      ys[i] = post.x()(0) - scale * z;
    } else {
      const double p = 2.0 * u - 1.0;
      ys[i] = c_loc + c_scale * std::tan(std::numbers::pi * (p - 0.5));
    }
  }
}

Round run_round(const Posterior& post, std::size_t n, std::uint64_t seed, bool want_hessian) {
  const int d = post.dim();
  Matrix ys(d, static_cast<Eigen::Index>(n));
  if (d == 1) {
    std::vector<double> flat;
    draw_1d(post, n, seed, flat);
    for (std::size_t i = 0; i < n; ++i) ys(0, static_cast<Eigen::Index>(i)) = flat[i];
  } else {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double scale = std::sqrt(post.kernel_var());
    Vector z(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) z(k) = normal(rng);
      const auto col = static_cast<Eigen::Index>(i);
      if (unif(rng) < 0.5) {
        double mix = 1.0;
        if (post.student()) mix = std::sqrt(post.alpha() / std::gamma_distribution<double>(0.5 * post.alpha(), 2.0)(rng));
        ys.col(col) = post.x() - scale * mix * z;
      } else {
        const double chi = std::gamma_distribution<double>(0.5, 2.0)(rng);
        ys.col(col) = post.cauchy_loc() + post.cauchy_chol() * z / std::sqrt(chi);
      }
    }
  }

  std::vector<double> logw(n);
  double lmax = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector y = ys.col(static_cast<Eigen::Index>(i));
    const double lk = post.log_kernel(post.x() - y, nullptr, nullptr);
    const double lq = num::log_sum_exp(lk, post.log_cauchy(y)) + std::log(0.5);
    logw[i] = post.log_target(y) + lk - lq;
    if (std::isnan(logw[i])) logw[i] = -kInf;
    lmax = std::max(lmax, logw[i]);
  }
  if (!std::isfinite(lmax)) fail(ErrorCode::kDomain, "all importance weights vanish; marginal density is zero here");

  Round r;
  r.score = Vector::Zero(d);
  Matrix second = Matrix::Zero(d, d);
  double sw = 0.0, sw2 = 0.0;
  Vector g;
  Matrix h;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(logw[i] - lmax);
    if (w == 0.0) continue;
    const Vector y = ys.col(static_cast<Eigen::Index>(i));
    post.log_kernel(post.x() - y, &g, want_hessian ? &h : nullptr);
    sw += w;
    sw2 += w * w;
    r.score += w * g;
    if (want_hessian) second += w * (h + g * g.transpose());
  }
  r.score /= sw;
  r.ess = sw * sw / sw2;
  if (want_hessian) r.hessian = second / sw - r.score * r.score.transpose();
  return r;
}

}  // namespace

ScoreEstimate marginal_score_snis(const DiffusionPath& path, double lambda, const Vector& x,
                                  const ScoreOptions& options, Matrix* hessian) {
  if (x.size() != path.dim()) fail(ErrorCode::kDimensionMismatch, "point dimension differs from path dimension");
  if (!(lambda > 0.0 && lambda < 1.0)) fail(ErrorCode::kDomain, "SNIS needs lambda strictly inside (0, 1)");
  if (options.particles == 0) fail(ErrorCode::kInvalidArgument, "particle count must be positive");
  const Posterior post(path, lambda, x);

  std::size_t n = options.particles;
  std::optional<Vector> previous;
  double last_ess = 0.0;
  for (std::uint64_t round = 0;; ++round) {
    Round r = run_round(post, n, derive_seed(options.seed, round), hessian != nullptr);
    last_ess = r.ess;
    bool settled = r.ess >= options.ess_floor;
    if (settled && options.rel_tol > 0.0) {
      settled = previous && (r.score - *previous).norm() <= options.rel_tol * std::max(r.score.norm(), 1.0);
    }
    if (settled) {
      ScoreEstimate est;
      est.score = std::move(r.score);
      est.ess = r.ess;
      est.particles = n;
      est.method = ScoreMethod::kSnis;
      if (hessian) *hessian = std::move(r.hessian);
      return est;
    }
    previous = r.score;
    if (n >= options.max_particles) break;
    n = std::min(2 * n, options.max_particles);
  }
  std::ostringstream os;
  os << "SNIS did not reach the effective sample size floor " << options.ess_floor << " (last ESS " << last_ess
     << ") or the requested agreement within " << options.max_particles << " particles";
  fail(ErrorCode::kNumerical, os.str());
}

}  // namespace dalmc
