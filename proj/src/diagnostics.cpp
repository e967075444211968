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

#include "dalmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dalmc {

namespace {

constexpr double kLogFloor = -700.0;
constexpr double kKernelReach = 8.0;

std::vector<double> row(const Matrix& m, Eigen::Index r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(r, j);
  return out;
}

double sample_sd(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Log of a windowed 1D Gaussian KDE at x over sorted samples.
double log_kde_1d(const std::vector<double>& sorted, double h, double x) {
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x - kKernelReach * h);
  const auto hi = std::upper_bound(lo, sorted.end(), x + kKernelReach * h);
  double acc = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double z = (x - *it) / h;
    acc += std::exp(-0.5 * z * z);
  }
  if (acc == 0.0) return kLogFloor;
  return std::log(acc) - std::log(static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double w2_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::kInvalidArgument, "W2 needs non-empty sample sets");
  if (a.size() != b.size()) fail(ErrorCode::kInvalidArgument, "W2 quantile coupling needs equal sample sizes");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(a.size()));
}

MetricReport w2_coordinatewise(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) fail(ErrorCode::kDimensionMismatch, "sample sets have different dimensions");
  MetricReport r;
  r.name = "w2";
  r.method = a.rows() == 1 ? "quantile_coupling" : "coordinate_mean_quantile_coupling";
  r.sample_sizes = {static_cast<std::size_t>(a.cols()), static_cast<std::size_t>(b.cols())};
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k) acc += w2_1d(row(a, k), row(b, k));
  r.value = acc / static_cast<double>(a.rows());
  return r;
}

double silverman_bandwidth(const std::vector<double>& x) {
  if (x.size() < 2) fail(ErrorCode::kInvalidArgument, "bandwidth needs at least two samples");
  const double sd = sample_sd(x);
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(s.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < s.size() ? s[i] * (1.0 - f) + s[i + 1] * f : s[i];
  };
  const double iqr = q(0.75) - q(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) fail(ErrorCode::kDomain, "degenerate samples: zero variance");
  return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

MetricReport kl_estimate(const Target& target, const Matrix& samples, const KlOptions& options) {
  const int d = target.dim();
  if (samples.rows() != d) fail(ErrorCode::kDimensionMismatch, "samples and target dimensions differ");
  if (d > 2) fail(ErrorCode::kInvalidArgument, "KL estimate supports d <= 2");
  const auto n = static_cast<std::size_t>(samples.cols());
  if (n < 1000) fail(ErrorCode::kInvalidArgument, "KL estimate needs at least 1000 samples");
  const Vector mean = target.mean();
  const Matrix cov = target.covariance();
  MetricReport r;
  r.name = "kl";
  r.sample_sizes = {n};

  if (d == 1) {
    std::vector<double> xs = row(samples, 0);
    const double h = options.bandwidth ? *options.bandwidth : silverman_bandwidth(xs);
    if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "bandwidth must be positive");
    if (!(sample_sd(xs) > 0.0)) fail(ErrorCode::kDomain, "degenerate samples: zero variance");
    std::sort(xs.begin(), xs.end());
    const double sd = std::sqrt(cov(0, 0));
    const std::size_t g = options.grid_points ? options.grid_points : 4001;
    const double lo = mean(0) - 6.0 * sd, hi = mean(0) + 6.0 * sd;
    const double dx = (hi - lo) / static_cast<double>(g - 1);
    double acc = 0.0;
    Vector p(1);
    for (std::size_t i = 0; i < g; ++i) {
      p(0) = lo + dx * static_cast<double>(i);
      const double lp = target.log_density_or_neg_inf(p);
      if (!std::isfinite(lp)) continue;
      const double w = (i == 0 || i + 1 == g) ? 0.5 : 1.0;
      acc += w * std::exp(lp) * (lp - log_kde_1d(xs, h, p(0)));
    }
    r.value = acc * dx;
    r.std_error = 0.0;
    r.method = "kde_silverman_bandwidth=" + std::to_string(h);
    return r;
  }

  // 2D: product Gaussian kernel with per-coordinate Silverman scale.
  std::vector<double> h(2);
  const double factor = std::pow(4.0 / (4.0 * static_cast<double>(n)), 1.0 / 6.0);
  for (int k = 0; k < 2; ++k) {
    const double sd = sample_sd(row(samples, k));
    if (!(sd > 0.0)) fail(ErrorCode::kDomain, "degenerate samples: zero variance");
    h[k] = options.bandwidth ? *options.bandwidth * sd : sd * factor;
  }
  std::vector<std::pair<double, double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {samples(0, static_cast<Eigen::Index>(i)), samples(1, static_cast<Eigen::Index>(i))};
  std::sort(pts.begin(), pts.end());
  const double norm = std::log(static_cast<double>(n) * 2.0 * std::numbers::pi * h[0] * h[1]);
  const std::size_t g = options.grid_points ? options.grid_points : 241;
  const double sd0 = std::sqrt(cov(0, 0)), sd1 = std::sqrt(cov(1, 1));
  const double lo0 = mean(0) - 6.0 * sd0, lo1 = mean(1) - 6.0 * sd1;
  const double d0 = 12.0 * sd0 / static_cast<double>(g - 1), d1 = 12.0 * sd1 / static_cast<double>(g - 1);
  double acc = 0.0;
  Vector p(2);
  for (std::size_t i = 0; i < g; ++i) {
    p(0) = lo0 + d0 * static_cast<double>(i);
    const auto first = std::lower_bound(pts.begin(), pts.end(), std::make_pair(p(0) - kKernelReach * h[0], -kInf));
    const auto last = std::upper_bound(first, pts.end(), std::make_pair(p(0) + kKernelReach * h[0], kInf));
    for (std::size_t j = 0; j < g; ++j) {
      p(1) = lo1 + d1 * static_cast<double>(j);
      const double lp = target.log_density_or_neg_inf(p);
      if (!std::isfinite(lp)) continue;
      double q = 0.0;
      for (auto it = first; it != last; ++it) {
        const double z1 = (p(1) - it->second) / h[1];
        if (std::abs(z1) > kKernelReach) continue;
        const double z0 = (p(0) - it->first) / h[0];
        q += std::exp(-0.5 * (z0 * z0 + z1 * z1));
      }
      const double lq = q > 0.0 ? std::log(q) - norm : kLogFloor;
      const double w = ((i == 0 || i + 1 == g) ? 0.5 : 1.0) * ((j == 0 || j + 1 == g) ? 0.5 : 1.0);
      acc += w * std::exp(lp) * (lp - lq);
    }
  }
  r.value = acc * d0 * d1;
  r.method = "kde_silverman_product";
  return r;
}

std::size_t mode_count(const std::vector<double>& values, double prominence) {
  if (values.size() < 3) return 0;
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) {
    if (v.empty() || x != v.back()) v.push_back(x);
  }
  const double top = *std::max_element(v.begin(), v.end());
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] > v[i + 1] && v[i] > prominence * top) ++count;
  }
  return count;
}

std::vector<double> hessian_norms_at(const DiffusionPath& path, double t, const Matrix& points,
                                     const ScoreOptions& options) {
  std::vector<double> out(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    ScoreOptions opts = options;
    opts.seed = derive_seed(options.seed, static_cast<std::uint64_t>(j));
    const Matrix h = path.marginal_hessian(t, points.col(j), opts);
    if (!h.allFinite()) fail(ErrorCode::kNumerical, "non-finite Hessian encountered");
    out[static_cast<std::size_t>(j)] = spectral_norm_sym(h);
  }
  return out;
}

bool looks_unbounded(const std::vector<double>& maxima, double reference) {
  if (maxima.size() < 2) return false;
  for (std::size_t i = 1; i < maxima.size(); ++i) {
    if (!(maxima[i] > maxima[i - 1])) return false;
  }
  return maxima.back() > 2.0 * reference;
}

HessianSupResult hessian_sup_estimate(const DiffusionPath& path, double t, std::size_t n_points, std::uint64_t seed,
                                      const ScoreOptions& options) {
  if (n_points < 1) fail(ErrorCode::kInvalidArgument, "need at least one point");
  const int d = path.dim();
  const Matrix pts = path.sample_marginal_at(path.lambda(t), n_points, seed);
  ScoreOptions opts = options;
  opts.seed = derive_seed(seed, 7);
  HessianSupResult res;
  res.points = n_points;
  const std::vector<double> sample_norms = hessian_norms_at(path, t, pts, opts);
  res.sample_max = *std::max_element(sample_norms.begin(), sample_norms.end());

  const Vector centre = pts.rowwise().mean();
  const double radius = std::max((pts.colwise() - centre).colwise().norm().maxCoeff(), 1e-12);
  Matrix dirs;
  if (d == 1) {
    dirs = Matrix(1, 2);
    dirs << 1.0, -1.0;
  } else if (d == 2) {
    const int k = 64;
    dirs = Matrix(2, k);
    for (int i = 0; i < k; ++i) {
      const double a = 2.0 * std::numbers::pi * i / k;
      dirs(0, i) = std::cos(a);
      dirs(1, i) = std::sin(a);
    }
  } else {
    Rng rng = make_rng(seed, 11);
    std::normal_distribution<double> normal;
    dirs = Matrix(d, 64);
    for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
      for (int i = 0; i < d; ++i) dirs(i, j) = normal(rng);
      dirs.col(j).normalize();
    }
  }
  for (double k : {1.0, 2.0, 4.0, 8.0}) {
    const double r = k * radius;
    Matrix ring = (r * dirs).colwise() + centre;
    const std::vector<double> norms = hessian_norms_at(path, t, ring, opts);
    res.ring_radii.push_back(r);
    res.ring_max.push_back(*std::max_element(norms.begin(), norms.end()));
  }
  res.value = std::max(res.sample_max, *std::max_element(res.ring_max.begin(), res.ring_max.end()));
  res.unbounded = looks_unbounded(res.ring_max, res.sample_max);
  return res;
}

MetricReport moment_estimate(const Matrix& samples, int p) {
  if (p != 2 && p != 4 && p != 6 && p != 8) fail(ErrorCode::kInvalidArgument, "moment order must be 2, 4, 6 or 8");
  const auto n = static_cast<std::size_t>(samples.cols());
  if (n < 2) fail(ErrorCode::kInvalidArgument, "moment estimate needs at least two samples");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(samples.col(static_cast<Eigen::Index>(i)).squaredNorm(), p / 2);
  MetricReport r;
  r.name = "moment_" + std::to_string(p);
  r.value = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  // Leave-one-out means give the jackknife variance, which for a mean equals s^2 / n.
  double ss = 0.0;
  for (double x : v) ss += (x - r.value) * (x - r.value);
  r.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  r.sample_sizes = {n};
  r.method = "jackknife";
  return r;
}

}  // namespace dalmc
