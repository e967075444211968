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

#ifndef DALMC_SRC_PATHS_QUADRATURE_2D_HPP
#define DALMC_SRC_PATHS_QUADRATURE_2D_HPP

#include "dalmc/paths.hpp"

namespace dalmc::detail {

double marginal_log_density_quadrature_2d(const DiffusionPath& path, double lambda, const Vector& x);

}  // namespace dalmc::detail

#endif  // DALMC_SRC_PATHS_QUADRATURE_2D_HPP
