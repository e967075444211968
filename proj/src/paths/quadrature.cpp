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
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dalmc/paths.hpp"
#include "paths/quadrature_2d.hpp"

namespace dalmc {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
constexpr double kQuadTol = 1e-12;
constexpr double kAcceptTol = 1e-6;

// Noise kernel of variance factor sigma^2 (1 - lambda), one coordinate at a time.
struct Kernel1D {
  bool student = false;
  double v = 1.0;
  double a = kInf;
  double log_norm = 0.0;

  Kernel1D(const BaseDistribution& base, double lambda) {
    v = base.sigma() * base.sigma() * (1.0 - lambda);
    student = base.heavy_tailed();
    if (student) {
      a = base.alpha();
      log_norm = std::lgamma(0.5 * (a + 1.0)) - std::lgamma(0.5 * a) - 0.5 * std::log(a * std::numbers::pi * v);
    } else {
      log_norm = -0.5 * std::log(2.0 * std::numbers::pi * v);
    }
  }

  double eval(double z, double* s, double* h) const {
    if (!student) {
      if (s) *s = -z / v;
      if (h) *h = -1.0 / v;
      return log_norm - 0.5 * z * z / v;
    }
    const double q = z * z / v;
    const double c = (a + 1.0) / (a + q);
    if (s) *s = -c * z / v;
    if (h) *h = -c / v + 2.0 * c / (a + q) * (z / v) * (z / v);
    return log_norm - 0.5 * (a + 1.0) * std::log1p(q / a);
  }

  double scale() const { return std::sqrt(v); }
};

double target_log_density_1d(const Target& target, double u) {
  thread_local Vector buf(1);
  buf.resize(1);
  buf(0) = u;
  return target.log_density_or_neg_inf(buf);
}

double target_log_density_2d(const Target& target, double u1, double u2) {
  thread_local Vector buf(2);
  buf.resize(2);
  buf(0) = u1;
  buf(1) = u2;
  return target.log_density_or_neg_inf(buf);
}

std::vector<double> coordinate_breaks(const Target& target, int coord, double center, double kernel_scale) {
  std::vector<double> b;
  if (target.dim() == 1) b = target.quadrature_breaks();
  if (b.empty()) {
    const double m = target.mean()(coord);
    const double sd = std::sqrt(target.covariance()(coord, coord));
    for (double k : {-30.0, -8.0, -3.0, 0.0, 3.0, 8.0, 30.0}) b.push_back(m + k * sd);
  }
  for (double k : {-30.0, -8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0, 30.0}) b.push_back(center + k * kernel_scale);
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double v : b) {
    if (!std::isfinite(v)) continue;
    if (out.empty() || v - out.back() > 1e-12 * (1.0 + std::abs(v))) out.push_back(v);
  }
  return out;
}

// Vector-valued adaptive Gauss-Kronrod (31-point rule, nested 15-point Gauss)
// so that several moments share every integrand evaluation. Refinement is
// global: the segment with the largest scaled error is split until the summed
// error of every component meets its tolerance.
template <std::size_t K>
using Moments = std::array<double, K>;

template <std::size_t K>
struct LineResult {
  Moments<K> value{};
  Moments<K> error{};
  Moments<K> l1{};
  std::size_t segments = 0;
};

constexpr std::size_t kSegmentBudget = 4000;
constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();

template <std::size_t K, class F>
void gk_segment(F& f, double a, double b, Moments<K>& kron, Moments<K>& err, Moments<K>& l1) {
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  const auto& x = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Moments<K> gauss{};
  kron.fill(0.0);
  l1.fill(0.0);
  // The 15-point Gauss rule has a node at 0 and uses the odd-indexed Kronrod nodes.
  {
    const Moments<K> f0 = f(mid);
    for (std::size_t k = 0; k < K; ++k) {
      kron[k] = f0[k] * wk[0];
      gauss[k] = f0[k] * wg[0];
      l1[k] = std::abs(f0[k]) * wk[0];
    }
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Moments<K> fp = f(mid + half * x[i]);
    const Moments<K> fm = f(mid - half * x[i]);
    for (std::size_t k = 0; k < K; ++k) {
      kron[k] += (fp[k] + fm[k]) * wk[i];
      l1[k] += (std::abs(fp[k]) + std::abs(fm[k])) * wk[i];
      if (i % 2 == 0) gauss[k] += (fp[k] + fm[k]) * wg[i / 2];
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    kron[k] *= half;
    gauss[k] *= half;
    l1[k] *= std::abs(half);
    // Errors at rounding level of the segment's own mass cannot be refined away.
    err[k] = std::max(std::abs(kron[k] - gauss[k]) - kRoundoff * l1[k], 0.0);
  }
}

template <std::size_t K>
struct Segment {
  int which;  // -1 left tail, 0 interior, 1 right tail
  double a, b;
  Moments<K> value, error, l1;
  double key;
};

// Inserts geometrically spaced points into gaps that are long compared with
// their neighbouring gaps, so that products of power-law tails stay smooth per piece.
std::vector<double> refine_breaks(std::vector<double> b) {
  if (b.size() < 3) return b;
  std::vector<double> out;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.push_back(b[i]);
    const double gap = b[i + 1] - b[i];
    const double left = i > 0 ? b[i] - b[i - 1] : kInf;
    const double right = i + 2 < n ? b[i + 2] - b[i + 1] : kInf;
    const double unit = std::min(left, right);
    if (!(gap > 8.0 * unit)) continue;
    // Distances from both ends grow by a factor 2 until they meet in the middle.
    std::vector<double> extra;
    const double d0 = std::max(left == kInf ? right : left, 1e-300);
    const double d1 = std::max(right == kInf ? left : right, 1e-300);
    for (double d = 2.0 * d0; d < 0.5 * gap; d *= 2.0) extra.push_back(b[i] + d);
    for (double d = 2.0 * d1; d < 0.5 * gap; d *= 2.0) extra.push_back(b[i + 1] - d);
    extra.push_back(b[i] + 0.5 * gap);
    std::sort(extra.begin(), extra.end());
    for (double e : extra) {
      if (e > out.back() && e < b[i + 1]) out.push_back(e);
    }
  }
  out.push_back(b.back());
  return out;
}

// Integral over the real line split at `breaks`. Tails are mapped to [0, 1)
// with u = edge +- scale * s / (1 - s), the scale being at least a tenth of the break span.
template <std::size_t K, class F>
LineResult<K> integrate_line(F&& f, const std::vector<double>& raw_breaks, double scale, double rel_tol) {
  const std::vector<double> breaks = refine_breaks(raw_breaks);
  const double lo = breaks.front();
  const double hi = breaks.back();
  const double tail_scale = std::max(scale, 0.1 * (hi - lo));
  auto right = [&](double s) {
    const double one_minus = 1.0 - s;
    Moments<K> v = f(hi + tail_scale * s / one_minus);
    const double jac = tail_scale / (one_minus * one_minus);
    for (double& c : v) c = (c == 0.0) ? 0.0 : c * jac;
    return v;
  };
  auto left = [&](double s) {
    const double one_minus = 1.0 - s;
    Moments<K> v = f(lo - tail_scale * s / one_minus);
    const double jac = tail_scale / (one_minus * one_minus);
    for (double& c : v) c = (c == 0.0) ? 0.0 : c * jac;
    return v;
  };
  auto eval = [&](Segment<K>& seg) {
    if (seg.which < 0) {
      gk_segment<K>(left, seg.a, seg.b, seg.value, seg.error, seg.l1);
    } else if (seg.which > 0) {
      gk_segment<K>(right, seg.a, seg.b, seg.value, seg.error, seg.l1);
    } else {
      gk_segment<K>(f, seg.a, seg.b, seg.value, seg.error, seg.l1);
    }
  };

  std::vector<Segment<K>> segs;
  segs.push_back({-1, 0.0, 1.0, {}, {}, {}, 0.0});
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) segs.push_back({0, breaks[i], breaks[i + 1], {}, {}, {}, 0.0});
  segs.push_back({1, 0.0, 1.0, {}, {}, {}, 0.0});
  for (auto& seg : segs) eval(seg);

  auto totals = [&](LineResult<K>& r) {
    r = LineResult<K>{};
    for (const auto& seg : segs) {
      for (std::size_t k = 0; k < K; ++k) {
        r.value[k] += seg.value[k];
        r.error[k] += seg.error[k];
        r.l1[k] += seg.l1[k];
      }
    }
    r.segments = segs.size();
  };
  LineResult<K> cur;
  totals(cur);
  Moments<K> tol;
  for (std::size_t k = 0; k < K; ++k) tol[k] = std::max(rel_tol * cur.l1[k], 1e-300);
  auto key_of = [&](const Segment<K>& seg) {
    double key = 0.0;
    for (std::size_t k = 0; k < K; ++k) key = std::max(key, seg.error[k] / tol[k]);
    const double mid = 0.5 * (seg.a + seg.b);
    if (!(seg.b - seg.a > 1e-13 * std::max(std::abs(mid), 1e-300))) key = 0.0;
    return key;
  };
  auto cmp = [](const Segment<K>& x, const Segment<K>& y) { return x.key < y.key; };
  for (auto& seg : segs) seg.key = key_of(seg);
  std::make_heap(segs.begin(), segs.end(), cmp);
  Moments<K> err = cur.error;
  auto converged = [&] {
    for (std::size_t k = 0; k < K; ++k) {
      if (err[k] > tol[k]) return false;
    }
    return true;
  };
  while (!converged() && segs.size() < kSegmentBudget && segs.front().key > 0.0) {
    std::pop_heap(segs.begin(), segs.end(), cmp);
    const Segment<K> parent = segs.back();
    segs.pop_back();
    const double m = 0.5 * (parent.a + parent.b);
    Segment<K> l{parent.which, parent.a, m, {}, {}, {}, 0.0};
    Segment<K> r{parent.which, m, parent.b, {}, {}, {}, 0.0};
    eval(l);
    eval(r);
    for (std::size_t k = 0; k < K; ++k) err[k] += l.error[k] + r.error[k] - parent.error[k];
    l.key = key_of(l);
    r.key = key_of(r);
    segs.push_back(l);
    std::push_heap(segs.begin(), segs.end(), cmp);
    segs.push_back(r);
    std::push_heap(segs.begin(), segs.end(), cmp);
  }
  totals(cur);
  return cur;
}

[[noreturn]] void non_convergence(double achieved) {
  std::ostringstream os;
  os << "quadrature non-convergence (achieved relative tolerance " << achieved << ")";
  fail(ErrorCode::kNumerical, os.str());
}

}  // namespace

QuadratureResult marginal_quadrature_1d(const DiffusionPath& path, double lambda, double x, bool derivatives) {
  if (path.dim() != 1) fail(ErrorCode::kInvalidArgument, "1D quadrature needs a one-dimensional path");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::kDomain, "lambda must lie in [0, 1]");
  QuadratureResult res;
  if (lambda == 0.0 || lambda == 1.0) {
    const TargetPtr end = path.closed_form_marginal(lambda);
    Vector s;
    Matrix h;
    res.log_density = end->evaluate(Vector::Constant(1, x), &s, &h);
    res.score = s(0);
    res.hessian = h(0, 0);
    return res;
  }
  const Target& target = path.target();
  const Kernel1D kernel(path.base(), lambda);
  const double sl = std::sqrt(lambda);
  const double center = x / sl;
  const double su = kernel.scale() / sl;
  const std::vector<double> breaks = coordinate_breaks(target, 0, center, su);

  auto logf = [&](double u) { return target_log_density_1d(target, u) + kernel.eval(x - sl * u, nullptr, nullptr); };
  double c = -kInf;
  for (double b : breaks) c = std::max(c, logf(b));
  if (!std::isfinite(c)) fail(ErrorCode::kDomain, "marginal density vanishes at the requested point");

  auto moments = [&](double u) -> Moments<3> {
    double sk = 0.0, hk = 0.0;
    const double lk = kernel.eval(x - sl * u, &sk, &hk);
    const double w = std::exp(target_log_density_1d(target, u) + lk - c);
    if (w == 0.0) return {0.0, 0.0, 0.0};
    return {w, w * sk, w * (hk + sk * sk)};
  };
  const LineResult<3> r = integrate_line<3>(moments, breaks, su, kQuadTol);
  const double i0 = r.value[0];
  if (!(i0 > 0.0)) fail(ErrorCode::kDomain, "marginal density vanishes at the requested point");
  res.abs_error = r.error[0] / i0;
  if (res.abs_error > kAcceptTol) non_convergence(res.abs_error);
  res.log_density = c + std::log(i0);
  if (!derivatives) return res;
  res.score = r.value[1] / i0;
  res.hessian = r.value[2] / i0 - res.score * res.score;
  return res;
}

namespace detail {

double marginal_log_density_quadrature_2d(const DiffusionPath& path, double lambda, const Vector& x) {
  const Target& target = path.target();
  const double sl = std::sqrt(lambda);
  const Kernel1D k1(path.base(), lambda);
  const double v = k1.v;
  const bool student = path.base().heavy_tailed();
  const double a = path.base().alpha();
  // Product form is exact for the Gaussian kernel only; the bivariate t kernel is evaluated jointly.
  const double log_norm_t =
      student ? std::lgamma(0.5 * (a + 2.0)) - std::lgamma(0.5 * a) - std::log(a * std::numbers::pi * v) : 0.0;
  auto log_kernel = [&](double z1, double z2) {
    if (!student) return k1.eval(z1, nullptr, nullptr) + k1.eval(z2, nullptr, nullptr);
    return log_norm_t - 0.5 * (a + 2.0) * std::log1p((z1 * z1 + z2 * z2) / (a * v));
  };
  const double su = k1.scale() / sl;
  const std::vector<double> b1 = coordinate_breaks(target, 0, x(0) / sl, su);
  const std::vector<double> b2 = coordinate_breaks(target, 1, x(1) / sl, su);
  auto logf = [&](double u1, double u2) {
    return target_log_density_2d(target, u1, u2) + log_kernel(x(0) - sl * u1, x(1) - sl * u2);
  };
  double c = -kInf;
  for (double p : b1)
    for (double q : b2) c = std::max(c, logf(p, q));
  if (!std::isfinite(c)) fail(ErrorCode::kDomain, "marginal density vanishes at the requested point");

  auto inner = [&](double u1) -> Moments<1> {
    auto f = [&](double u2) -> Moments<1> { return {std::exp(logf(u1, u2) - c)}; };
    return {integrate_line<1>(f, b2, su, 1e-10).value[0]};
  };
  const LineResult<1> outer = integrate_line<1>(inner, b1, su, 1e-10);
  const double total = outer.value[0];
  if (!(total > 0.0)) fail(ErrorCode::kDomain, "marginal density vanishes at the requested point");
  const double rel = outer.error[0] / total;
  if (rel > kAcceptTol) non_convergence(rel);
  return c + std::log(total);
}

}  // namespace detail

}  // namespace dalmc
