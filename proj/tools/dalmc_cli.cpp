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

// Command-line front end. Talks to the library through the C interface only.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dalmc/dalmc.h"

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int threads = 0;
};

dalmc_options to_options(const Globals& g) {
  dalmc_options o{};
  if (g.seed) {
    o.has_seed = 1;
    o.seed = *g.seed;
  }
  o.out_dir = g.out ? g.out->c_str() : nullptr;
  o.threads = g.threads;
  return o;
}

// Prints the JSON result or the error; returns the process exit code.
int finish(dalmc_status st, char* json) {
  if (st != DALMC_OK) {
    std::cerr << "dalmc: " << dalmc_status_name(st) << ": " << dalmc_last_error() << '\n';
    dalmc_string_free(json);
    return static_cast<int>(st);
  }
  if (json) std::cout << json << '\n';
  dalmc_string_free(json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion annealed Langevin Monte Carlo experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dalmc_version()));
  Globals g;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "Override the experiment seed");
    sub->add_option("--out", g.out, "Override the output directory");
    sub->add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string config, samples, target;
  int code = 0;

  CLI::App* targets = app.add_subcommand("targets", "Target distributions");
  targets->require_subcommand(1);
  CLI::App* validate = targets->add_subcommand("validate", "Smoothness report for a [target] config");
  validate->add_option("config", config, "Config file with a [target] table")->required()->check(CLI::ExistingFile);
  add_globals(validate);
  validate->callback([&] {
    const dalmc_options o = to_options(g);
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_targets_validate(config.c_str(), &o, &out);
    code = finish(st, out);
  });

  CLI::App* schedules = app.add_subcommand("schedules", "Annealing schedules");
  schedules->require_subcommand(1);
  CLI::App* check = schedules->add_subcommand("check", "A5 and A7 constants of a [schedule] config");
  check->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  check->callback([&] {
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_schedules_check(config.c_str(), &out);
    code = finish(st, out);
  });

  CLI::App* paths = app.add_subcommand("paths", "Diffusion and geometric paths");
  paths->require_subcommand(1);
  CLI::App* heatmap = paths->add_subcommand("heatmap", "Write heatmap.csv for the configured path");
  heatmap->add_option("config", config, "Experiment config with [diagnostics.heatmap]")->required()->check(CLI::ExistingFile);
  add_globals(heatmap);
  heatmap->callback([&] {
    const dalmc_options o = to_options(g);
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_paths_heatmap(config.c_str(), &o, &out);
    code = finish(st, out);
  });

  CLI::App* dalmc = app.add_subcommand("dalmc", "Sampler");
  dalmc->require_subcommand(1);
  CLI::App* run = dalmc->add_subcommand("run", "Run an experiment: samples.csv and report.json");
  run->add_option("config", config, "Experiment config")->required()->check(CLI::ExistingFile);
  add_globals(run);
  run->callback([&] {
    const dalmc_options o = to_options(g);
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_run(config.c_str(), &o, &out);
    code = finish(st, out);
  });

  CLI::App* theory = app.add_subcommand("theory", "Step-count planners");
  theory->require_subcommand(1);
  CLI::App* plan = theory->add_subcommand("plan", "Plan (kappa, M) and evaluate the KL bound");
  std::optional<double> eps, d, m2, l_max, l_pi, k_pi, alpha, horizon, int_l2, eps_score;
  plan->add_option("config", config, "Optional experiment config supplying d, M2 and L_max")->check(CLI::ExistingFile);
  plan->add_option("--eps", eps, "Target accuracy");
  plan->add_option("--d", d, "Dimension");
  plan->add_option("--M2", m2, "Second moment of the target");
  plan->add_option("--L-max", l_max, "Supremum of the path Lipschitz constants");
  plan->add_option("--L-pi", l_pi, "Lipschitz constant of the target score");
  plan->add_option("--K-pi", k_pi, "Moment constant of the target score");
  plan->add_option("--alpha", alpha, "Degrees of freedom of a heavy-tailed base");
  plan->add_option("--horizon", horizon, "Schedule horizon T");
  plan->add_option("--int-L2", int_l2, "Integral of squared Lipschitz constants (default T L_max^2)");
  plan->add_option("--eps-score", eps_score, "Score error level");
  plan->callback([&] {
    nlohmann::json params = nlohmann::json::object();
    if (!config.empty()) params["config"] = config;
    auto put = [&](const char* k, const std::optional<double>& v) {
      if (v) params[k] = *v;
    };
    put("eps", eps);
    put("d", d);
    put("M2", m2);
    put("L_max", l_max);
    put("L_pi", l_pi);
    put("K_pi", k_pi);
    put("alpha", alpha);
    put("horizon", horizon);
    put("int_L2", int_l2);
    put("eps_score", eps_score);
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_theory_plan(params.dump().c_str(), &out);
    code = finish(st, out);
  });

  CLI::App* diagnostics = app.add_subcommand("diagnostics", "Sample diagnostics");
  diagnostics->require_subcommand(1);
  CLI::App* compare = diagnostics->add_subcommand("compare", "Metric battery for samples against a target");
  compare->add_option("samples", samples, "CSV with chain,x1..xd columns")->required()->check(CLI::ExistingFile);
  compare->add_option("target", target, "Config file with a [target] table")->required()->check(CLI::ExistingFile);
  add_globals(compare);
  compare->callback([&] {
    const dalmc_options o = to_options(g);
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_diagnostics_compare(samples.c_str(), target.c_str(), &o, &out);
    code = finish(st, out);
  });

  CLI::App* sweep = app.add_subcommand("sweep", "Convergence sweep over M, eps_score or kappa: sweep.csv");
  sweep->add_option("config", config, "Experiment config with a [sweep] table")->required()->check(CLI::ExistingFile);
  add_globals(sweep);
  sweep->callback([&] {
    const dalmc_options o = to_options(g);
    char* out = nullptr;
    const dalmc_status st = dalmc_cmd_sweep(config.c_str(), &o, &out);
    code = finish(st, out);
  });

  CLI11_PARSE(app, argc, argv);
  return code;
}
