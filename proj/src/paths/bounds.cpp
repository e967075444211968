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
#include <functional>
#include <numbers>
#include <sstream>

#include "dalmc/paths.hpp"

namespace dalmc {

namespace {

SmoothnessConstants constants_for(const DiffusionPath& path) {
  if (path.constants()) return *path.constants();
  return path.target().known_constants();
}

struct Candidate {
  double value = kInf;
  std::string regime;
  std::optional<double> poincare;
};

// Hessian sandwich b I <= -Hess log mu <= a I given a Poincare constant c of
// the posterior, Gaussian base with s = sigma^2 (1 - lambda).
double sandwich(double s, double L, double lambda, double c) {
  const double a = std::min(1.0 / s, L / lambda);
  const double b = std::max((1.0 / s) * (1.0 - c / s), -(L / lambda) * (1.0 + c * L / lambda));
  return std::max(a, std::abs(b));
}

void keep_best(Candidate& best, const Candidate& c) {
  if (c.value < best.value || best.regime.empty()) best = c;
}

LipschitzBound gaussian_base_bound(const DiffusionPath& path, double lambda, const SmoothnessConstants& k) {
  const double sigma2 = path.base().sigma() * path.base().sigma();
  const double s = sigma2 * (1.0 - lambda);
  Candidate best;
  bool any = false;

  if (k.L_pi) {
    const double L = *k.L_pi;
    const double lambda_tilde = sigma2 * L / (1.0 + sigma2 * L);
    const bool convex_posterior = lambda > lambda_tilde;
    const double c_convex = convex_posterior ? 1.0 / (1.0 / s - L / lambda) : kInf;

    if (k.M_pi && k.r) {
      any = true;
      const double M = *k.M_pi;
      const double r = *k.r;
      double c = 2.0 / (M / lambda + 1.0 / s) * std::exp(16.0 * (L + lambda / s) * r * r);
      if (!(M / lambda + 1.0 / s > 0.0)) c = kInf;
      std::string tag = "convex_tail";
      if (c_convex < c) {
        c = c_convex;
        tag = "convex_tail_convex_posterior";
      }
      keep_best(best, {sandwich(s, L, lambda, c), tag, c});
    }
    if (k.decay) {
      any = true;
      const HessianDecay& dec = *k.decay;
      const double rt2 = std::max(lambda * dec.r * dec.r, (2.0 * s - lambda * dec.alpha1) / dec.alpha2);
      double c = 4.0 * s * std::exp(16.0 * (L / lambda + 1.0 / s) * rt2);
      std::string tag = "hessian_decay";
      if (c_convex < c) {
        c = c_convex;
        tag = "hessian_decay_convex_posterior";
      }
      keep_best(best, {sandwich(s, L, lambda, c), tag, c});
    }
    if (!k.M_pi && !k.decay && convex_posterior) {
      any = true;
      keep_best(best, {sandwich(s, L, lambda, c_convex), "convex_posterior", c_convex});
    }
  }
  if (k.compact_gaussian) {
    any = true;
    // -Hess = C^-1 - C^-1 V C^-1 with C = s I + lambda Cov(G) and 0 <= V <= lambda spread2 I.
    const CompactGaussianForm& cg = *k.compact_gaussian;
    const double c_min = s + lambda * cg.tau2;
    const double c_max = s + lambda * cg.tau2_max.value_or(cg.tau2);
    const double var = lambda * cg.spread2;
    auto low = [&](double c) { return 1.0 / c - var / (c * c); };
    const double v = std::max({1.0 / c_min, -low(c_min), -low(c_max)});
    keep_best(best, {v, "compact_gaussian", std::nullopt});
  }
  if (!any) fail(ErrorCode::kInvalidArgument, "missing smoothness constants for the Lipschitz bound");
  return {best.value, best.regime, best.poincare};
}

LipschitzBound heavy_base_bound(const DiffusionPath& path, double lambda, const SmoothnessConstants& k) {
  const double a = path.base().alpha();
  const double d = path.dim();
  const double sigma2 = path.base().sigma() * path.base().sigma();
  const double l_sigma = path.base().lipschitz();
  Candidate best;
  keep_best(best, {l_sigma / (1.0 - lambda) + (a + d) * (a + d) / (2.0 * a * sigma2 * (1.0 - lambda)), "base_branch",
                   std::nullopt});
  if (k.L_pi && k.C_pi) keep_best(best, {(*k.L_pi + *k.C_pi) / lambda, "target_branch", std::nullopt});
  if (k.compact_student) {
    const double at = k.compact_student->alpha;
    const double t2 = k.compact_student->tau2;
    const double l_tau = (at + d) / (at * t2);
    keep_best(best, {l_tau / lambda + (at + d) * (at + d) / (2.0 * at * t2 * lambda), "compact_student", std::nullopt});
  }
  return {best.value, best.regime, std::nullopt};
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) acc += 0.5 * (f[i] + f[i + 1]) * (t[i + 1] - t[i]);
  return acc;
}

}  // namespace

LipschitzBound lipschitz_bound_at(const DiffusionPath& path, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kDomain, "lambda must lie in [0, 1]");
  if (lambda == 0.0) return {path.base().lipschitz(), "base", std::nullopt};
  const SmoothnessConstants k = constants_for(path);
  if (lambda == 1.0) {
    if (!k.L_pi) fail(ErrorCode::kInvalidArgument, "missing smoothness constants: L_pi");
    return {*k.L_pi, "target", std::nullopt};
  }
  return path.base().heavy_tailed() ? heavy_base_bound(path, lambda, k) : gaussian_base_bound(path, lambda, k);
}

LipschitzProfile lipschitz_profile(const DiffusionPath& path, std::size_t grid_points) {
  if (grid_points < 2) fail(ErrorCode::kInvalidArgument, "profile grid needs at least two points");
  const double horizon = path.schedule().horizon();
  LipschitzProfile prof;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = horizon * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const LipschitzBound b = lipschitz_bound(path, t);
    prof.times.push_back(t);
    prof.bounds.push_back(b.value);
    prof.regimes.push_back(b.regime);
    prof.poincare.push_back(b.poincare);
    prof.max = std::max(prof.max, b.value);
  }
  return prof;
}

ActionBound action_bound(const DiffusionPath& path, std::size_t grid_size) {
  ActionBound out;
  out.second_moment = path.target().second_moment();
  if (!std::isfinite(out.second_moment)) fail(ErrorCode::kDomain, "target second moment is not finite");
  const double noise = path.base().noise_second_moment();
  const double c7 = schedule_constant(path.schedule(), ScheduleCondition::kA7Sqrt, grid_size);
  if (std::isfinite(c7)) out.a7_bound = c7 * std::numbers::pi / 8.0 * (out.second_moment + noise);
  if (!path.base().heavy_tailed()) {
    const double c5 = schedule_constant(path.schedule(), ScheduleCondition::kA5Log, grid_size);
    if (std::isfinite(c5)) out.a5_bound = c5 * (out.second_moment + noise);
  }
  if (!out.a5_bound && !out.a7_bound) {
    fail(ErrorCode::kDomain, "schedule constant is infinite for every applicable condition");
  }
  if (out.a7_bound && (!out.a5_bound || *out.a7_bound <= *out.a5_bound)) {
    out.value = *out.a7_bound;
    out.condition = ScheduleCondition::kA7Sqrt;
    out.c_lambda = c7;
  } else {
    out.value = *out.a5_bound;
    out.condition = ScheduleCondition::kA5Log;
    out.c_lambda = schedule_constant(path.schedule(), ScheduleCondition::kA5Log, grid_size);
  }
  return out;
}

ActionEstimate action_estimate(const DiffusionPath& path, std::size_t grid_points, std::size_t n_samples,
                               std::uint64_t seed) {
  if (grid_points < 100) fail(ErrorCode::kInvalidArgument, "action estimate needs at least 100 grid points");
  const double horizon = path.schedule().horizon();
  const double delta = horizon / static_cast<double>(grid_points - 1);
  std::vector<double> times(grid_points);
  std::vector<double> lambdas(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    times[i] = delta * static_cast<double>(i);
    lambdas[i] = path.lambda(times[i]);
  }

  ActionEstimate est;
  const auto* gm = dynamic_cast<const GaussianMixture*>(&path.target());
  const bool gaussian = !path.base().heavy_tailed() && gm && gm->num_components() == 1;
  std::function<double(std::size_t, std::size_t)> w2;

  // Marginals N(sqrt(l) m, l S + (1 - l) sigma^2 I) share eigenvectors, so the
  // Bures term reduces to a sum over the eigenvalues of S.
  Vector eig;
  Vector mean;
  const double sigma2 = path.base().sigma() * path.base().sigma();
  if (gaussian) {
    est.method = "gaussian_w2";
    mean = gm->component_mean(0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gm->component_covariance(0), Eigen::EigenvaluesOnly);
    eig = es.eigenvalues();
    w2 = [&](std::size_t i, std::size_t j) {
      const double li = lambdas[i], lj = lambdas[j];
      double acc = (std::sqrt(li) - std::sqrt(lj)) * (std::sqrt(li) - std::sqrt(lj)) * mean.squaredNorm();
      for (Eigen::Index k = 0; k < eig.size(); ++k) {
        const double si = std::sqrt(li * eig(k) + (1.0 - li) * sigma2);
        const double sj = std::sqrt(lj * eig(k) + (1.0 - lj) * sigma2);
        acc += (si - sj) * (si - sj);
      }
      return std::sqrt(acc);
    };
  }

  // Tweedie's formula gives the conditional velocity E[dX_t/dt | X_t = x] =
  // lambda' / (2 lambda) (x + sigma^2 grad log mu_t(x)). It solves the continuity
  // equation, so its kinetic energy bounds the action from above (with
  // equality in one dimension).
  if (!gaussian && path.dim() > 1 && path.has_closed_form()) {
    if (n_samples < 2) fail(ErrorCode::kInvalidArgument, "action estimate needs at least two samples");
    est.method = "velocity_field";
    const std::uint64_t draw_seed = derive_seed(seed, 3);
    for (std::size_t i = 0; i + 1 < grid_points; ++i) {
      const double t = 0.5 * (times[i] + times[i + 1]);
      const double lam = path.lambda(t);
      if (!(lam > 0.0)) fail(ErrorCode::kNumerical, "velocity field undefined where lambda = 0");
      const double rate = path.schedule().lambda_dot(t) / (2.0 * lam);
      const TargetPtr marginal = path.closed_form_marginal(lam);
      const Matrix xt = path.sample_marginal_at(lam, n_samples, draw_seed);
      double energy = 0.0;
      for (Eigen::Index k = 0; k < xt.cols(); ++k) {
        const Vector x = xt.col(k);
        energy += (x + sigma2 * marginal->score(x)).squaredNorm();
      }
      est.value += rate * rate * energy / static_cast<double>(n_samples) * delta;
    }
    return est;
  }

  std::vector<double> xs, zs;
  std::vector<std::vector<double>> window(3);
  std::vector<std::size_t> window_index(3, grid_points);
  if (!gaussian) {
    if (path.dim() != 1) {
      fail(ErrorCode::kInvalidArgument, "action estimate needs d = 1 or a Gaussian base with closed-form marginals");
    }
    if (n_samples < 2) fail(ErrorCode::kInvalidArgument, "action estimate needs at least two samples");
    est.method = "quantile_coupling";
    const Matrix x = path.target().sample(n_samples, derive_seed(seed, 1));
    const Matrix z = path.base().distribution()->sample(n_samples, derive_seed(seed, 2));
    xs.assign(x.data(), x.data() + n_samples);
    zs.assign(z.data(), z.data() + n_samples);
    auto sorted_at = [&](std::size_t i) -> const std::vector<double>& {
      std::vector<double>& slot = window[i % 3];
      if (window_index[i % 3] != i) {
        const double a = std::sqrt(lambdas[i]);
        const double b = std::sqrt(1.0 - lambdas[i]);
        slot.resize(n_samples);
        for (std::size_t k = 0; k < n_samples; ++k) slot[k] = a * xs[k] + b * zs[k];
        std::sort(slot.begin(), slot.end());
        window_index[i % 3] = i;
      }
      return slot;
    };
    w2 = [&, sorted_at](std::size_t i, std::size_t j) {
      const std::vector<double>& u = sorted_at(i);
      const std::vector<double>& v = sorted_at(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < n_samples; ++k) acc += (u[k] - v[k]) * (u[k] - v[k]);
      return std::sqrt(acc / static_cast<double>(n_samples));
    };
  }

  std::vector<double> speed2(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    double v;
    if (i == 0) {
      v = w2(1, 0) / delta;
    } else if (i + 1 == grid_points) {
      v = w2(i, i - 1) / delta;
    } else {
      v = w2(i + 1, i - 1) / (2.0 * delta);
    }
    speed2[i] = v * v;
  }
  est.value = trapezoid(times, speed2);

  try {
    const LipschitzProfile prof = lipschitz_profile(path, grid_points);
    if (delta * prof.max > 1.0) {
      std::ostringstream os;
      os << "grid too coarse: delta * L_max = " << delta * prof.max << " > 1";
      est.warnings.push_back(os.str());
    }
  } catch (const Error&) {
    est.warnings.push_back("L_max unavailable; grid resolution not checked");
  }
  return est;
}

}  // namespace dalmc
