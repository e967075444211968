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

// Shared helpers for the test binaries: random generators for property
// tests, finite differences and fixture locations.

#ifndef DALMC_TESTS_SUPPORT_HPP
#define DALMC_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dalmc/common.hpp"
#include "dalmc/targets.hpp"

namespace dalmc::testing {

inline std::string source_dir() { return DALMC_SOURCE_DIR; }
inline std::string config_path(const std::string& name) { return source_dir() + "/configs/" + name; }

inline std::vector<std::string> shipped_experiment_configs() {
  return {"figure1.toml",      "gaussian_sanity.toml", "gaussian_shift.toml", "gaussian_bias.toml",
          "heavy_tailed.toml", "bimodal.toml",         "ou_gaussian.toml",    "mixture2d.toml"};
}

inline std::vector<std::string> shipped_target_configs() {
  std::vector<std::string> out;
  for (const std::string& c : shipped_experiment_configs()) out.push_back(config_path(c));
  for (const char* c : {"shared_mean.toml", "mixture2d_equal.toml", "student_t_2d.toml", "compact_gaussian.toml"}) {
    out.push_back(config_path(std::string("targets/") + c));
  }
  return out;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path p = std::filesystem::temp_directory_path() / ("dalmc_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Small generator toolkit for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vector vector(int d, double lo, double hi) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  // SPD matrix with eigenvalues in [lo, hi].
  Matrix spd(int d, double lo, double hi) {
    Matrix a(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) a(i, j) = normal();
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ();
    Vector ev(d);
    for (int i = 0; i < d; ++i) ev(i) = uniform(lo, hi);
    Matrix m = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
  }

  std::vector<double> weights(std::size_t k) {
    std::vector<double> w(k);
    double s = 0.0;
    for (double& x : w) {
      x = uniform(0.2, 1.0);
      s += x;
    }
    for (double& x : w) x /= s;
    return w;
  }

  std::vector<double> sample(std::size_t n, double mean, double sd) {
    std::vector<double> v(n);
    for (double& x : v) x = mean + sd * normal();
    return v;
  }

  Rng& engine() { return rng_; }

 private:
  Rng rng_;
};

// Central differences with step h.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h = 1e-5) {
  const Eigen::Index d = x.size();
  Matrix j(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vector a = x, b = x;
    a(i) += h;
    b(i) -= h;
    j.col(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return j;
}

// Max-norm error relative to max(|reference|, 1).
inline double rel_error(const Matrix& value, const Matrix& reference) {
  return (value - reference).cwiseAbs().maxCoeff() / std::max(reference.cwiseAbs().maxCoeff(), 1.0);
}

// Test points: half drawn from the target, half spread over a wider box.
inline Matrix probe_points(const Target& target, std::size_t n, std::uint64_t seed) {
  const int d = target.dim();
  const Matrix draws = target.sample(n, seed);
  const Vector mu = target.mean();
  const double spread = 3.0 * std::sqrt(std::max(target.covariance().diagonal().maxCoeff(), 1e-12)) + 1.0;
  Gen g(seed ^ 0x9e3779b97f4a7c15ULL);
  Matrix out(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out.col(c) = (i % 2 == 0) ? Vector(draws.col(c)) : Vector(mu + g.vector(d, -spread, spread));
  }
  return out;
}

}  // namespace dalmc::testing

#endif  // DALMC_TESTS_SUPPORT_HPP
