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

#include "dalmc/dalmc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "dalmc/config.hpp"
#include "dalmc/experiment.hpp"
#include "dalmc/paths.hpp"

struct dalmc_target {
  dalmc::TargetPtr target;
};

struct dalmc_path {
  dalmc::DiffusionPath path;
};

namespace {

thread_local std::string g_last_error;

dalmc_status status_of(dalmc::ErrorCode code) {
  switch (code) {
    case dalmc::ErrorCode::kInvalidArgument: return DALMC_E_INVALID_ARGUMENT;
    case dalmc::ErrorCode::kDimensionMismatch: return DALMC_E_DIMENSION;
    case dalmc::ErrorCode::kDomain: return DALMC_E_DOMAIN;
    case dalmc::ErrorCode::kConfig: return DALMC_E_CONFIG;
    case dalmc::ErrorCode::kNumerical: return DALMC_E_NUMERICAL;
    case dalmc::ErrorCode::kIo: return DALMC_E_IO;
    case dalmc::ErrorCode::kRuntime: return DALMC_E_RUNTIME;
  }
  return DALMC_E_INTERNAL;
}

template <class F>
dalmc_status guarded(F&& body) {
  try {
    body();
    return DALMC_OK;
  } catch (const dalmc::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return DALMC_E_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DALMC_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DALMC_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DALMC_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) dalmc::fail(dalmc::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(const nlohmann::json& j, char** json_out) { *json_out = dup_string(j.dump(2)); }

dalmc::RunOverrides overrides_of(const dalmc_options* o) {
  dalmc::RunOverrides r;
  if (!o) return r;
  if (o->has_seed) r.seed = o->seed;
  if (o->out_dir) r.out_dir = std::string(o->out_dir);
  if (o->threads < 0) dalmc::fail(dalmc::ErrorCode::kInvalidArgument, "threads must be at least 1");
  if (o->threads > 0) r.threads = o->threads;
  return r;
}

dalmc::Vector point(const double* x, int d) { return Eigen::Map<const dalmc::Vector>(x, d); }

}  // namespace

extern "C" {

const char* dalmc_version(void) { return "0.1.0"; }

const char* dalmc_last_error(void) { return g_last_error.c_str(); }

const char* dalmc_status_name(dalmc_status status) {
  switch (status) {
    case DALMC_OK: return "ok";
    case DALMC_E_INVALID_ARGUMENT: return "invalid argument";
    case DALMC_E_DIMENSION: return "dimension mismatch";
    case DALMC_E_DOMAIN: return "domain error";
    case DALMC_E_CONFIG: return "config error";
    case DALMC_E_NUMERICAL: return "numerical failure";
    case DALMC_E_IO: return "i/o error";
    case DALMC_E_RUNTIME: return "runtime error";
    case DALMC_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dalmc_string_free(char* s) { std::free(s); }

dalmc_status dalmc_target_from_toml(const char* toml_text, dalmc_target** out) {
  return guarded([&] {
    require(toml_text && out, "null argument");
    *out = nullptr;
    *out = new dalmc_target{dalmc::parse_target_config(toml_text)};
  });
}

dalmc_status dalmc_target_from_file(const char* path, dalmc_target** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    *out = new dalmc_target{dalmc::load_target_config(path)};
  });
}

void dalmc_target_free(dalmc_target* target) { delete target; }

int dalmc_target_dim(const dalmc_target* target) { return target ? target->target->dim() : 0; }

dalmc_status dalmc_target_evaluate(const dalmc_target* target, const double* x, double* log_density, double* score,
                                   double* hessian) {
  return guarded([&] {
    require(target && x && log_density, "null argument");
    const int d = target->target->dim();
    dalmc::Vector s;
    dalmc::Matrix h;
    *log_density = target->target->evaluate(point(x, d), score ? &s : nullptr, hessian ? &h : nullptr);
    if (score) dalmc::Vector::Map(score, d) = s;
    if (hessian) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) hessian[i * d + j] = h(i, j);
      }
    }
  });
}

dalmc_status dalmc_target_sample(const dalmc_target* target, size_t n, uint64_t seed, double* out) {
  return guarded([&] {
    require(target && out, "null argument");
    require(n > 0, "sample count must be positive");
    const dalmc::Matrix m = target->target->sample(n, seed);
    // Column-major d x n is exactly the sample-major layout.
    std::memcpy(out, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  });
}

dalmc_status dalmc_path_from_toml(const char* toml_text, dalmc_path** out) {
  return guarded([&] {
    require(toml_text && out, "null argument");
    *out = nullptr;
    const dalmc::ExperimentConfig cfg = dalmc::parse_experiment_config(toml_text);
    dalmc::DiffusionPath path = cfg.make_path();
    path.set_constants(dalmc::analyze_smoothness(*cfg.target, cfg.seed).constants());
    *out = new dalmc_path{std::move(path)};
  });
}

void dalmc_path_free(dalmc_path* path) { delete path; }

int dalmc_path_dim(const dalmc_path* path) { return path ? path->path.dim() : 0; }

dalmc_status dalmc_path_lambda(const dalmc_path* path, double t, double* lambda) {
  return guarded([&] {
    require(path && lambda, "null argument");
    *lambda = path->path.lambda(t);
  });
}

dalmc_status dalmc_path_log_density(const dalmc_path* path, double t, const double* x, double* out) {
  return guarded([&] {
    require(path && x && out, "null argument");
    *out = path->path.marginal_log_density_at(path->path.lambda(t), point(x, path->path.dim()));
  });
}

dalmc_status dalmc_path_score(const dalmc_path* path, double t, const double* x, uint64_t seed, double* score) {
  return guarded([&] {
    require(path && x && score, "null argument");
    dalmc::ScoreOptions opts;
    opts.seed = seed;
    const dalmc::ScoreEstimate est = path->path.marginal_score(t, point(x, path->path.dim()), opts);
    dalmc::Vector::Map(score, path->path.dim()) = est.score;
  });
}

dalmc_status dalmc_path_lipschitz_bound(const dalmc_path* path, double t, double* out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = dalmc::lipschitz_bound(path->path, t).value;
  });
}

dalmc_status dalmc_path_action_bound(const dalmc_path* path, double* out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = dalmc::action_bound(path->path).value;
  });
}

dalmc_status dalmc_cmd_targets_validate(const char* config_path, const dalmc_options* options, char** json_out) {
  return guarded([&] {
    require(config_path && json_out, "null argument");
    *json_out = nullptr;
    const std::uint64_t seed = options && options->has_seed ? options->seed : 0;
    emit(dalmc::targets_validate(config_path, seed), json_out);
  });
}

dalmc_status dalmc_cmd_schedules_check(const char* config_path, char** json_out) {
  return guarded([&] {
    require(config_path && json_out, "null argument");
    *json_out = nullptr;
    emit(dalmc::schedules_check(config_path), json_out);
  });
}

dalmc_status dalmc_cmd_paths_heatmap(const char* config_path, const dalmc_options* options, char** json_out) {
  return guarded([&] {
    require(config_path && json_out, "null argument");
    *json_out = nullptr;
    emit(dalmc::paths_heatmap(dalmc::load_experiment_config(config_path, overrides_of(options))), json_out);
  });
}

dalmc_status dalmc_cmd_run(const char* config_path, const dalmc_options* options, char** json_out) {
  return guarded([&] {
    require(config_path && json_out, "null argument");
    *json_out = nullptr;
    emit(dalmc::run_experiment(dalmc::load_experiment_config(config_path, overrides_of(options))), json_out);
  });
}

dalmc_status dalmc_cmd_sweep(const char* config_path, const dalmc_options* options, char** json_out) {
  return guarded([&] {
    require(config_path && json_out, "null argument");
    *json_out = nullptr;
    emit(dalmc::run_sweep(dalmc::load_experiment_config(config_path, overrides_of(options))), json_out);
  });
}

dalmc_status dalmc_cmd_diagnostics_compare(const char* samples_csv, const char* target_config,
                                           const dalmc_options* options, char** json_out) {
  return guarded([&] {
    require(samples_csv && target_config && json_out, "null argument");
    *json_out = nullptr;
    const std::uint64_t seed = options && options->has_seed ? options->seed : 0;
    emit(dalmc::diagnostics_compare(samples_csv, target_config, seed), json_out);
  });
}

dalmc_status dalmc_cmd_theory_plan(const char* params_json, char** json_out) {
  return guarded([&] {
    require(params_json && json_out, "null argument");
    *json_out = nullptr;
    const nlohmann::json params = nlohmann::json::parse(params_json);
    require(params.is_object(), "planner parameters must be a JSON object");
    emit(dalmc::theory_plan(params), json_out);
  });
}

}  // extern "C"
