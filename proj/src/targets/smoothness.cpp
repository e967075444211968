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

#include "dalmc/targets.hpp"

namespace dalmc {

namespace {

constexpr std::size_t kCloudSamples = 10000;
constexpr std::size_t kZeroSetDraws = 1000;
constexpr double kEmpiricalSafety = 1.1;

std::size_t default_direction_count(int d) { return d == 1 ? 2 : (d == 2 ? 360 : 512); }

// Largest Hessian spectral norm over target samples and rings of radius 1..5 times the sample radius.
double cloud_hessian_max(const Target& target, std::uint64_t seed) {
  const Matrix xs = target.sample(kCloudSamples, seed);
  const Vector center = target.mean();
  Matrix h;
  double best = 0.0;
  double radius = 0.0;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const Vector x = xs.col(j);
    target.evaluate(x, nullptr, &h);
    best = std::max(best, spectral_norm_sym(h));
    radius = std::max(radius, (x - center).norm());
  }
  const Matrix dirs = scan_directions(target.dim(), default_direction_count(target.dim()), seed + 1);
  for (int k = 1; k <= 5; ++k) {
    for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
      const Vector x = center + (k * radius) * dirs.col(j);
      target.evaluate(x, nullptr, &h);
      best = std::max(best, spectral_norm_sym(h));
    }
  }
  return best;
}

// Smallest origin-centred radius beyond which lambda_min(-Hess) >= m on every scanned shell.
// Returns +inf when the outermost shell already fails.
double convexity_radius(const Target& target, double m, std::uint64_t seed) {
  const Matrix cov = target.covariance();
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  const double outer = 10.0 * (target.mean().norm() + 3.0 * std::sqrt(es.eigenvalues().maxCoeff()));
  const Matrix dirs = scan_directions(target.dim(), default_direction_count(target.dim()), seed);
  constexpr int kShells = 400;
  Matrix h;
  for (int s = kShells; s >= 1; --s) {
    const double rad = outer * s / kShells;
    bool ok = true;
    for (Eigen::Index j = 0; j < dirs.cols() && ok; ++j) {
      target.evaluate(rad * dirs.col(j), nullptr, &h);
      Eigen::SelfAdjointEigenSolver<Matrix> hs(-h, Eigen::EigenvaluesOnly);
      ok = hs.eigenvalues().minCoeff() >= m;
    }
    if (!ok) {
      if (s == kShells) return kInf;
      return rad;
    }
  }
  return outer / kShells;
}

void fill_convexity_empirical(const Target& target, double m, std::uint64_t seed, SmoothnessReport& rep) {
  const double r = convexity_radius(target, m, seed);
  rep.convexity_method = "empirical shell scan";
  if (std::isfinite(r)) {
    rep.strongly_convex_outside_ball = true;
    rep.M_pi = m;
    rep.r = r;
  }
}

}  // namespace

Matrix scan_directions(int dim, std::size_t count, std::uint64_t seed) {
  if (dim == 1) {
    Matrix d(1, 2);
    d << 1.0, -1.0;
    return d;
  }
  Matrix d(dim, static_cast<Eigen::Index>(count));
  if (dim == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      d(0, k) = std::cos(a);
      d(1, k) = std::sin(a);
    }
    return d;
  }
  Rng rng = make_rng(seed, 0x5ca);
  std::normal_distribution<double> normal;
  for (Eigen::Index k = 0; k < d.cols(); ++k) {
    if (k < 2 * dim) {
      d.col(k).setZero();
      d(k / 2, k) = (k % 2 == 0) ? 1.0 : -1.0;
      continue;
    }
    for (int i = 0; i < dim; ++i) d(i, k) = normal(rng);
    d.col(k).normalize();
  }
  return d;
}

SmoothnessConstants SmoothnessReport::constants() const {
  SmoothnessConstants c = known;
  if (lipschitz_ok && std::isfinite(L_pi)) c.L_pi = L_pi;
  if (strongly_convex_outside_ball) {
    c.M_pi = M_pi;
    c.r = r;
  }
  if (C_pi) c.C_pi = C_pi;
  return c;
}

SmoothnessReport check_mixture_smoothness(const GaussianMixture& mix, std::uint64_t seed) {
  SmoothnessReport rep;
  rep.known = mix.known_constants();
  rep.warnings = mix.warnings();
  const std::size_t k = mix.num_components();
  const int d = mix.dim();
  Rng rng = make_rng(seed, 0xb5);
  std::normal_distribution<double> normal;

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const Matrix& pi = mix.component_precision(i);
      const Matrix& pj = mix.component_precision(j);
      if ((mix.component_covariance(i) - mix.component_covariance(j)).norm() <=
          1e-12 * mix.component_covariance(i).norm()) {
        continue;
      }
      PairDiagnostic diag;
      diag.i = i;
      diag.j = j;
      const Matrix diff = pi - pj;
      Eigen::SelfAdjointEigenSolver<Matrix> es(diff);
      const Vector ev = es.eigenvalues();
      const Matrix& vecs = es.eigenvectors();
      const double scale = ev.cwiseAbs().maxCoeff();
      const double zero_tol = 1e-10 * scale;
      std::vector<int> pos, neg, nul;
      for (int e = 0; e < d; ++e) {
        if (ev(e) > zero_tol) pos.push_back(e);
        else if (ev(e) < -zero_tol) neg.push_back(e);
        else nul.push_back(e);
      }
      const bool indefinite = !pos.empty() && !neg.empty();
      diag.zero_set_nonempty = indefinite || !nul.empty();
      if (!diag.zero_set_nonempty) {
        diag.reason = "difference of precisions is definite";
        rep.pairs.push_back(diag);
        continue;
      }

      std::vector<Vector> candidates;
      for (int e : nul) candidates.push_back(vecs.col(e));
      for (int p : pos) {
        for (int n : neg) {
          const Vector a = std::sqrt(-ev(n)) * vecs.col(p);
          const Vector b = std::sqrt(ev(p)) * vecs.col(n);
          candidates.push_back((a + b).normalized());
          candidates.push_back((a - b).normalized());
        }
      }
      for (std::size_t s = 0; s < kZeroSetDraws; ++s) {
        Vector w(d);
        for (int q = 0; q < d; ++q) w(q) = normal(rng);
        const Vector coords = vecs.transpose() * w;
        Vector a = Vector::Zero(d), b = Vector::Zero(d), c = Vector::Zero(d);
        double qa = 0.0, qb = 0.0;
        for (int p : pos) {
          a += coords(p) * vecs.col(p);
          qa += ev(p) * coords(p) * coords(p);
        }
        for (int n : neg) {
          b += coords(n) * vecs.col(n);
          qb += ev(n) * coords(n) * coords(n);
        }
        for (int z : nul) c += coords(z) * vecs.col(z);
        Vector u = indefinite ? Vector(std::sqrt(-qb) * a + std::sqrt(qa) * b + std::sqrt(qa) * c) : c;
        if (u.norm() == 0.0) continue;
        candidates.push_back(u.normalized());
      }

      const Vector gi = pi * mix.component_mean(i);
      const Vector gj = pj * mix.component_mean(j);
      const double mean_tol = 1e-10 * (1.0 + gi.norm() + gj.norm());
      for (const Vector& u : candidates) {
        if (std::abs(u.dot(diff * u)) > 1e-8 * scale) continue;
        ++diag.candidates;
        bool rescued = false;
        if ((diff * u).norm() <= 1e-8 * scale) {
          ++diag.rescued_null;
          rescued = true;
        } else if (std::abs(u.dot(gi - gj)) > mean_tol) {
          ++diag.rescued_mean;
          rescued = true;
        } else {
          for (std::size_t m = 0; m < k && !rescued; ++m) {
            const Matrix& pm = mix.component_precision(m);
            const double tol = 1e-10 * (pi.norm() + pj.norm() + pm.norm());
            if (u.dot((pi - pm) * u) > tol || u.dot((pj - pm) * u) > tol) rescued = true;
          }
          if (rescued) ++diag.rescued_third;
        }
        if (!rescued && diag.passes) {
          diag.passes = false;
          std::string dir;
          for (int q = 0; q < d; ++q) dir += (q ? ", " : "") + std::to_string(u(q));
          diag.reason = "direction (" + dir + ") has zero curvature difference and no rescue condition holds";
        }
      }
      if (diag.passes) diag.reason = "every zero-set direction is rescued";
      if (!diag.passes) rep.failed_pairs.emplace_back(i, j);
      rep.pairs.push_back(diag);
    }
  }

  rep.lipschitz_ok = rep.failed_pairs.empty();
  if (!rep.lipschitz_ok) {
    rep.L_pi = kInf;
    rep.L_pi_method = "unbounded";
    rep.convexity_method = "not evaluated";
    return rep;
  }
  if (rep.known.L_pi) {
    rep.L_pi = *rep.known.L_pi;
    rep.L_pi_method = "analytic";
  } else {
    double tail = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(mix.component_precision(i), Eigen::EigenvaluesOnly);
      tail = std::max(tail, es.eigenvalues().maxCoeff());
    }
    rep.L_pi = kEmpiricalSafety * std::max(tail, cloud_hessian_max(mix, seed));
    rep.L_pi_method = "empirical";
  }
  if (rep.known.M_pi) {
    rep.strongly_convex_outside_ball = true;
    rep.M_pi = *rep.known.M_pi;
    rep.r = rep.known.r.value_or(0.0);
    rep.convexity_method = "analytic";
  } else {
    double pmin = kInf;
    for (std::size_t i = 0; i < k; ++i) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(mix.component_precision(i), Eigen::EigenvaluesOnly);
      pmin = std::min(pmin, es.eigenvalues().minCoeff());
    }
    fill_convexity_empirical(mix, 0.5 * pmin, seed, rep);
  }
  return rep;
}

SmoothnessReport analyze_smoothness(const Target& target, std::uint64_t seed) {
  if (const auto* mix = dynamic_cast<const GaussianMixture*>(&target)) return check_mixture_smoothness(*mix, seed);
  SmoothnessReport rep;
  rep.known = target.known_constants();
  if (const auto* m = dynamic_cast<const MixtureTarget*>(&target)) rep.warnings = m->warnings();
  rep.lipschitz_ok = true;
  if (rep.known.L_pi) {
    rep.L_pi = *rep.known.L_pi;
    rep.L_pi_method = "analytic";
  } else {
    rep.L_pi = kEmpiricalSafety * cloud_hessian_max(target, seed);
    rep.L_pi_method = "empirical";
  }
  rep.C_pi = rep.known.C_pi;
  if (rep.known.M_pi) {
    rep.strongly_convex_outside_ball = true;
    rep.M_pi = *rep.known.M_pi;
    rep.r = rep.known.r.value_or(0.0);
    rep.convexity_method = "analytic";
  } else if (const auto* su = dynamic_cast<const SmoothedUniformMixture*>(&target)) {
    const double w = su->smoothing_width();
    fill_convexity_empirical(target, 0.5 * std::min(1.0, 1.0 / (w * w)), seed, rep);
  } else if (const auto* cp = dynamic_cast<const CompactPlusNoise*>(&target);
             cp && cp->noise() == NoiseKind::kGaussian) {
    fill_convexity_empirical(target, 0.5 / (cp->tau() * cp->tau()), seed, rep);
  } else {
    rep.convexity_method = rep.known.decay ? "not strongly convex; Hessian decay holds" : "not evaluated";
  }
  return rep;
}

double lsi_constant_bound(double M_pi, double L_pi, double r) {
  if (!(M_pi > 0.0)) fail(ErrorCode::kInvalidArgument, "M_pi must be positive");
  if (!(L_pi >= 0.0)) fail(ErrorCode::kInvalidArgument, "L_pi must be nonnegative");
  if (!(r >= 0.0)) fail(ErrorCode::kInvalidArgument, "r must be nonnegative");
  return 2.0 / M_pi * std::exp(16.0 * L_pi * r * r);
}

KpiEstimate estimate_K_pi(const Target& target, std::size_t n, std::uint64_t seed) {
  if (n < 1000) fail(ErrorCode::kInvalidArgument, "estimate_K_pi needs at least 1000 samples");
  const Matrix xs = target.sample(n, seed);
  Vector s;
  double sum = 0.0, sum2 = 0.0;
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    target.evaluate(xs.col(j), &s, nullptr);
    const double v = std::pow(s.squaredNorm(), 4);
    sum += v;
    sum2 += v * v;
  }
  const double nn = static_cast<double>(n);
  const double m = sum / nn;
  const double var = std::max(0.0, (sum2 / nn - m * m) * nn / (nn - 1.0));
  KpiEstimate out;
  out.n = n;
  out.value = std::sqrt(m);
  out.std_error = m > 0.0 ? std::sqrt(var / nn) / (2.0 * out.value) : 0.0;
  return out;
}

}  // namespace dalmc
