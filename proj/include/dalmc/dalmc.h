/*
 * Copyright 2026 The dalmc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libdalmc. Every call returns a dalmc_status; on failure the
 * message is available from dalmc_last_error() on the calling thread until the
 * next failing call. Strings returned through char** are owned by the caller
 * and must be released with dalmc_string_free. */

#ifndef DALMC_DALMC_H
#define DALMC_DALMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DALMC_BUILDING_LIBRARY)
#define DALMC_API __declspec(dllexport)
#else
#define DALMC_API __declspec(dllimport)
#endif
#else
#define DALMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dalmc_status {
  DALMC_OK = 0,
  DALMC_E_INVALID_ARGUMENT = 1,
  DALMC_E_DIMENSION = 2,
  DALMC_E_DOMAIN = 3,
  DALMC_E_CONFIG = 4,
  DALMC_E_NUMERICAL = 5,
  DALMC_E_IO = 6,
  DALMC_E_RUNTIME = 7,
  DALMC_E_INTERNAL = 99
} dalmc_status;

typedef struct dalmc_target dalmc_target;
typedef struct dalmc_path dalmc_path;

/* Overrides for the command entry points. Zero-initialise and set the has_*
 * flags for fields that should replace the config values. */
typedef struct dalmc_options {
  int has_seed;
  uint64_t seed;
  const char* out_dir; /* NULL keeps the config value */
  int threads;         /* 0 keeps the config value */
} dalmc_options;

DALMC_API const char* dalmc_version(void);
DALMC_API const char* dalmc_last_error(void);
DALMC_API const char* dalmc_status_name(dalmc_status status);
DALMC_API void dalmc_string_free(char* s);

/* Targets built from the [target] table of a TOML document. */
DALMC_API dalmc_status dalmc_target_from_toml(const char* toml_text, dalmc_target** out);
DALMC_API dalmc_status dalmc_target_from_file(const char* path, dalmc_target** out);
DALMC_API void dalmc_target_free(dalmc_target* target);
DALMC_API int dalmc_target_dim(const dalmc_target* target);
/* score (length d) and hessian (d*d, row-major) may be NULL. */
DALMC_API dalmc_status dalmc_target_evaluate(const dalmc_target* target, const double* x, double* log_density,
                                             double* score, double* hessian);
/* out receives n*d values, sample-major. */
DALMC_API dalmc_status dalmc_target_sample(const dalmc_target* target, size_t n, uint64_t seed, double* out);

/* Diffusion paths built from a full experiment config (target, base, schedule). */
DALMC_API dalmc_status dalmc_path_from_toml(const char* toml_text, dalmc_path** out);
DALMC_API void dalmc_path_free(dalmc_path* path);
DALMC_API int dalmc_path_dim(const dalmc_path* path);
DALMC_API dalmc_status dalmc_path_lambda(const dalmc_path* path, double t, double* lambda);
DALMC_API dalmc_status dalmc_path_log_density(const dalmc_path* path, double t, const double* x, double* out);
DALMC_API dalmc_status dalmc_path_score(const dalmc_path* path, double t, const double* x, uint64_t seed, double* score);
DALMC_API dalmc_status dalmc_path_lipschitz_bound(const dalmc_path* path, double t, double* out);
DALMC_API dalmc_status dalmc_path_action_bound(const dalmc_path* path, double* out);

/* Command entry points. Each writes a JSON document to *json_out. */
DALMC_API dalmc_status dalmc_cmd_targets_validate(const char* config_path, const dalmc_options* options,
                                                  char** json_out);
DALMC_API dalmc_status dalmc_cmd_schedules_check(const char* config_path, char** json_out);
DALMC_API dalmc_status dalmc_cmd_paths_heatmap(const char* config_path, const dalmc_options* options,
                                               char** json_out);
DALMC_API dalmc_status dalmc_cmd_run(const char* config_path, const dalmc_options* options, char** json_out);
DALMC_API dalmc_status dalmc_cmd_sweep(const char* config_path, const dalmc_options* options, char** json_out);
DALMC_API dalmc_status dalmc_cmd_diagnostics_compare(const char* samples_csv, const char* target_config,
                                                     const dalmc_options* options, char** json_out);
/* params_json: object with eps, d, M2, L_max, L_pi, K_pi, alpha, horizon,
 * int_L2, eps_score and optionally "config" (path to an experiment config). */
DALMC_API dalmc_status dalmc_cmd_theory_plan(const char* params_json, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* DALMC_DALMC_H */
