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

#ifndef DALMC_COMMON_HPP
#define DALMC_COMMON_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dalmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ErrorCode {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kDomain = 3,
  kConfig = 4,
  kNumerical = 5,
  kIo = 6,
  kRuntime = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

// Stream seeds are mixed with splitmix64 so that (seed, i) and (seed, i+1)
// give unrelated generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm_sym(const Matrix& a);

}  // namespace dalmc

#endif  // DALMC_COMMON_HPP
