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

// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "dalmc/dalmc.h"

namespace {

const char* kGaussianPath = R"(
[target]
kind = "gaussian"
mean = 3.0
variance = 4.0

[base]
kind = "gaussian"
sigma = 1.0

[schedule]
family = "cosine"
)";

std::string config(const char* name) { return std::string(DALMC_SOURCE_DIR) + "/configs/" + name; }

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(dalmc_version()) == "0.1.0");
  CHECK(std::string(dalmc_status_name(DALMC_E_CONFIG)) == "config error");
  dalmc_string_free(nullptr);
}

TEST_CASE("target handle") {
  dalmc_target* t = nullptr;
  REQUIRE(dalmc_target_from_toml("[target]\nkind = \"student_t\"\ndof = 4.0\n", &t) == DALMC_OK);
  CHECK(dalmc_target_dim(t) == 1);
  double x = 1.0, logp = 0.0, score = 0.0, hess = 0.0;
  REQUIRE(dalmc_target_evaluate(t, &x, &logp, &score, &hess) == DALMC_OK);
  CHECK(score == doctest::Approx(-1.0));
  x = 0.0;
  REQUIRE(dalmc_target_evaluate(t, &x, &logp, nullptr, &hess) == DALMC_OK);
  CHECK(std::exp(logp) == doctest::Approx(0.375));
  CHECK(hess == doctest::Approx(-1.25));

  std::vector<double> draws(1000);
  REQUIRE(dalmc_target_sample(t, draws.size(), 5, draws.data()) == DALMC_OK);
  std::vector<double> again(1000);
  REQUIRE(dalmc_target_sample(t, again.size(), 5, again.data()) == DALMC_OK);
  CHECK(draws == again);
  CHECK(dalmc_target_sample(t, 0, 5, draws.data()) == DALMC_E_INVALID_ARGUMENT);
  dalmc_target_free(t);
}

TEST_CASE("row-major Hessian and sample-major draws in two dimensions") {
  dalmc_target* t = nullptr;
  REQUIRE(dalmc_target_from_file(config("targets/shared_mean.toml").c_str(), &t) == DALMC_OK);
  REQUIRE(dalmc_target_dim(t) == 2);
  const double x[2] = {20.0, 3.0};
  double logp = 0.0, score[2], hess[4];
  REQUIRE(dalmc_target_evaluate(t, x, &logp, score, hess) == DALMC_OK);
  CHECK(hess[1] == doctest::Approx(hess[2]));
  std::vector<double> draws(2 * 4);
  REQUIRE(dalmc_target_sample(t, 4, 1, draws.data()) == DALMC_OK);
  dalmc_target_free(t);
}

TEST_CASE("path handle") {
  dalmc_path* p = nullptr;
  REQUIRE(dalmc_path_from_toml(kGaussianPath, &p) == DALMC_OK);
  CHECK(dalmc_path_dim(p) == 1);
  double lambda = 0.0;
  REQUIRE(dalmc_path_lambda(p, 0.5, &lambda) == DALMC_OK);
  CHECK(lambda == doctest::Approx(0.5));
  const double x = 1.0;
  double logp = 0.0, score = 0.0;
  REQUIRE(dalmc_path_log_density(p, 0.5, &x, &logp) == DALMC_OK);
  const double mean = 3.0 / std::sqrt(2.0), var = 2.5;
  CHECK(logp == doctest::Approx(-0.5 * (x - mean) * (x - mean) / var - 0.5 * std::log(2.0 * M_PI * var)));
  REQUIRE(dalmc_path_score(p, 0.5, &x, 0, &score) == DALMC_OK);
  CHECK(score == doctest::Approx(-(x - mean) / var));
  double bound = 0.0;
  REQUIRE(dalmc_path_action_bound(p, &bound) == DALMC_OK);
  CHECK(bound > 0.0);
  REQUIRE(dalmc_path_lipschitz_bound(p, 0.0, &bound) == DALMC_OK);
  CHECK(bound == doctest::Approx(1.0));
  CHECK(dalmc_path_lambda(p, 7.0, &lambda) == DALMC_E_DOMAIN);
  CHECK(std::strlen(dalmc_last_error()) > 0);
  dalmc_path_free(p);
}

TEST_CASE("errors map to status codes") {
  dalmc_target* t = nullptr;
  CHECK(dalmc_target_from_toml("[target]\nkind = \"gaussian\"\nmean = 0.0\nvarience = 1.0\n", &t) == DALMC_E_CONFIG);
  CHECK(t == nullptr);
  CHECK(std::string(dalmc_last_error()).find("varience") != std::string::npos);
  CHECK(dalmc_target_from_toml(nullptr, &t) == DALMC_E_INVALID_ARGUMENT);
  CHECK(dalmc_target_from_file("/nonexistent.toml", &t) == DALMC_E_IO);

  REQUIRE(dalmc_target_from_toml("[target]\nkind = \"gaussian\"\nmean = [0.0, 0.0]\nvariance = 1.0\n", &t) ==
          DALMC_OK);
  dalmc_target_free(t);

  char* out = nullptr;
  CHECK(dalmc_cmd_theory_plan("[1, 2]", &out) == DALMC_E_INVALID_ARGUMENT);
  CHECK(dalmc_cmd_theory_plan("{not json", &out) == DALMC_E_INVALID_ARGUMENT);
  CHECK(out == nullptr);
}

TEST_CASE("command entry points") {
  char* out = nullptr;
  REQUIRE(dalmc_cmd_theory_plan(R"({"eps": 0.1, "d": 2, "M2": 2, "L_max": 4})", &out) == DALMC_OK);
  CHECK(std::string(out).find("128000000") != std::string::npos);
  dalmc_string_free(out);

  REQUIRE(dalmc_cmd_schedules_check(config("figure1.toml").c_str(), &out) == DALMC_OK);
  CHECK(std::string(out).find("\"cosine\"") != std::string::npos);
  dalmc_string_free(out);

  REQUIRE(dalmc_cmd_targets_validate(config("targets/shared_mean.toml").c_str(), nullptr, &out) == DALMC_OK);
  CHECK(std::string(out).find("\"lipschitz_ok\": false") != std::string::npos);
  dalmc_string_free(out);

  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "dalmc_capi_heatmap";
  std::filesystem::remove_all(dir);
  dalmc_options opts{};
  opts.out_dir = dir.c_str();
  REQUIRE(dalmc_cmd_paths_heatmap(config("figure1.toml").c_str(), &opts, &out) == DALMC_OK);
  CHECK(std::filesystem::exists(dir / "heatmap.csv"));
  dalmc_string_free(out);

  opts.threads = -1;
  CHECK(dalmc_cmd_run(config("gaussian_sanity.toml").c_str(), &opts, &out) == DALMC_E_INVALID_ARGUMENT);
}
