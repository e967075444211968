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

#include "dalmc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "dalmc/diagnostics.hpp"
#include "dalmc/theory.hpp"

namespace dalmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kBoundStream = 0x510e527fade682d1ULL;
// Relative slack when comparing an estimate with its bound, for rounding only.
constexpr double kBoundSlack = 1e-9;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json matrix_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

// Output files are staged in memory and written only once everything succeeded.
struct Staged {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string body) { files.emplace_back(std::move(name), std::move(body)); }

  void commit(const std::string& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& [name, body] : files) {
      const fs::path final_path = fs::path(dir) / name;
      const fs::path tmp = fs::path(dir) / (name + ".tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
        out << body;
        if (!out) fail(ErrorCode::kIo, "write failed for '" + tmp.string() + "'");
      }
      fs::rename(tmp, final_path, ec);
      if (ec) fail(ErrorCode::kIo, "cannot move output into '" + final_path.string() + "': " + ec.message());
    }
  }
};

void check_writable(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + dir + "': " + ec.message());
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, "output path '" + dir + "' is not a directory");
}

std::string samples_csv(const Trajectory& tr) {
  std::vector<char> flagged(tr.chains, 0);
  for (std::size_t c : tr.flagged_chains) flagged[c] = 1;
  std::ostringstream os;
  os << "chain";
  for (Eigen::Index j = 0; j < tr.final_samples.rows(); ++j) os << ",x" << (j + 1);
  os << '\n';
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < tr.chains; ++c) {
    if (flagged[c]) continue;
    os << c;
    for (Eigen::Index j = 0; j < tr.final_samples.rows(); ++j) os << ',' << format_double(tr.final_samples(j, col));
    os << '\n';
    ++col;
  }
  return os.str();
}

DiffusionPath configured_path(const ExperimentConfig& cfg) {
  DiffusionPath path = cfg.make_path();
  // Constants established once from the target analysis feed every bound.
  const SmoothnessReport rep = analyze_smoothness(*cfg.target, cfg.seed);
  path.set_constants(rep.constants());
  return path;
}

ScoreOracle make_oracle(const DiffusionPath& path, const ExperimentConfig& cfg, const SamplerConfig& sc,
                        const ScorePerturbation& perturbation) {
  return ScoreOracle(path, sc.kappa, cfg.sampler.score, perturbation);
}

std::size_t reference_size(const ExperimentConfig& cfg, std::size_t n) {
  return cfg.diagnostics.reference_samples > 0 ? cfg.diagnostics.reference_samples : n;
}

struct SampleMetrics {
  double w2 = 0.0;
  double kl = std::numeric_limits<double>::quiet_NaN();
  json battery;
};

SampleMetrics sample_metrics(const Target& target, const Matrix& samples, std::size_t n_ref, std::uint64_t seed,
                             const std::optional<double>& bandwidth) {
  SampleMetrics out;
  json m = json::object();
  const Matrix reference = target.sample(n_ref, derive_seed(seed, kReferenceStream));
  const MetricReport w2 = w2_coordinatewise(samples, reference);
  out.w2 = w2.value;
  m["w2"] = {{"value", num(w2.value)}, {"method", w2.method}, {"sample_sizes", w2.sample_sizes}};
  if (target.dim() <= 2 && samples.cols() >= 1000) {
    KlOptions opts;
    opts.bandwidth = bandwidth;
    const MetricReport kl = kl_estimate(target, samples, opts);
    out.kl = kl.value;
    m["kl"] = {{"value", num(kl.value)}, {"direction", "KL(target || samples)"}, {"method", kl.method}};
  } else {
    m["kl"] = {{"value", nullptr}, {"skipped", "needs d <= 2 and at least 1000 samples"}};
  }
  m["mean"] = {{"value", vector_json(samples.rowwise().mean())}, {"exact", vector_json(target.mean())}};
  for (int p : {2, 4}) {
    const MetricReport mp = moment_estimate(samples, p);
    m["moment_" + std::to_string(p)] = {{"value", num(mp.value)}, {"std_error", num(mp.std_error)}};
  }
  m["moment_2"]["exact"] = num(target.second_moment());
  out.battery = std::move(m);
  return out;
}

double integrate_l2(const LipschitzProfile& prof) {
  double s = 0.0;
  for (std::size_t i = 1; i < prof.times.size(); ++i) {
    const double a = prof.bounds[i - 1], b = prof.bounds[i];
    s += 0.5 * (a * a + b * b) * (prof.times[i] - prof.times[i - 1]);
  }
  return s;
}

json bound_row(const std::string& name, double bound, double estimate) {
  const bool pass = std::isfinite(bound) && std::isfinite(estimate) && estimate <= bound * (1.0 + kBoundSlack);
  return {{"name", name}, {"bound", num(bound)}, {"estimate", num(estimate)}, {"pass", pass}};
}

struct BoundChecks {
  json rows = json::array();
  json skipped = json::array();
};

BoundChecks bound_checks(const DiffusionPath& path, const ExperimentConfig& cfg, const Trajectory& tr) {
  BoundChecks out;
  const DiagnosticsSpec& dg = cfg.diagnostics;
  const std::uint64_t seed = derive_seed(cfg.seed, kBoundStream);
  const double horizon = path.schedule().horizon();

  // Lipschitz constant of the path score at evenly spaced times.
  for (std::size_t i = 0; i < dg.lipschitz_times; ++i) {
    const double t =
        dg.lipschitz_times == 1 ? horizon : horizon * static_cast<double>(i) / static_cast<double>(dg.lipschitz_times - 1);
    std::ostringstream name;
    name << "lipschitz(t=" << format_double(t) << ")";
    try {
      const LipschitzBound b = lipschitz_bound(path, t);
      const HessianSupResult est = hessian_sup_estimate(path, t, dg.hessian_points, derive_seed(seed, i), cfg.sampler.score);
      json row = bound_row(name.str(), b.value, est.value);
      row["t"] = t;
      row["lambda"] = path.lambda(t);
      row["regime"] = b.regime;
      row["unbounded_growth"] = est.unbounded;
      out.rows.push_back(std::move(row));
    } catch (const Error& e) {
      out.skipped.push_back({{"name", name.str()}, {"reason", e.what()}});
    }
  }

  // Action of the path.
  try {
    const ActionBound b = action_bound(path);
    try {
      const ActionEstimate est = action_estimate(path, dg.action_grid, dg.action_samples, derive_seed(seed, 1000));
      json row = bound_row("action", b.value, est.value);
      row["condition"] = condition_name(b.condition);
      row["method"] = est.method;
      row["warnings"] = est.warnings;
      out.rows.push_back(std::move(row));
    } catch (const Error& e) {
      out.skipped.push_back({{"name", "action"}, {"bound", num(b.value)}, {"reason", e.what()}});
    }
  } catch (const Error& e) {
    out.skipped.push_back({{"name", "action"}, {"reason", e.what()}});
  }

  // KL bound of the run against the measured KL of the final samples.
  try {
    const LipschitzProfile prof = lipschitz_profile(path, dg.profile_points);
    const int d = path.dim();
    const double m2 = path.target().second_moment();
    const double rhs = kl_rhs_gaussian(cfg.sampler.config.kappa, static_cast<double>(cfg.sampler.config.steps), prof.max,
                                       m2, d, integrate_l2(prof), tr.implied_eps_score);
    if (d <= 2 && tr.final_samples.cols() >= 1000) {
      KlOptions opts;
      opts.bandwidth = dg.kl_bandwidth;
      const MetricReport kl = kl_estimate(path.target(), tr.final_samples, opts);
      json row = bound_row("kl_rhs", rhs, kl.value);
      row["L_max"] = num(prof.max);
      out.rows.push_back(std::move(row));
    } else {
      out.skipped.push_back({{"name", "kl_rhs"}, {"bound", num(rhs)}, {"reason", "KL estimate needs d <= 2 and 1000 samples"}});
    }
  } catch (const Error& e) {
    out.skipped.push_back({{"name", "kl_rhs"}, {"reason", e.what()}});
  }
  return out;
}

json base_json(const BaseSpec& b) {
  json j = {{"kind", b.kind == BaseKind::kGaussian ? "gaussian" : "student_t"}, {"sigma", b.sigma}};
  if (b.kind == BaseKind::kStudentT) j["alpha"] = b.alpha;
  return j;
}

json config_echo(const ExperimentConfig& cfg) {
  const SamplerConfig& sc = cfg.sampler.config;
  return {
      {"name", cfg.name},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"target", {{"kind", cfg.target_kind}, {"dim", cfg.target->dim()}}},
      {"base", base_json(cfg.base)},
      {"schedule", {{"family", cfg.schedule.family}, {"phi", cfg.schedule.phi}, {"horizon", cfg.schedule.horizon}}},
      {"sampler",
       {{"kappa", sc.kappa},
        {"steps", sc.steps},
        {"chains", sc.chains},
        {"step_plan", step_plan_name(sc.step_plan)},
        {"score_method", score_method_name(cfg.sampler.score.method)},
        {"perturbation", cfg.sampler.perturbation.name()}}},
  };
}

struct Heatmap {
  std::string csv;
  json modes = json::array();
};

Heatmap build_heatmap(const ExperimentConfig& cfg) {
  const HeatmapSpec& h = cfg.diagnostics.heatmap;
  if (cfg.target->dim() != 1) fail(ErrorCode::kInvalidArgument, "heatmaps need a one-dimensional target");
  const DiffusionPath path = cfg.make_path();
  const Schedule schedule = cfg.make_schedule();
  const GeometricPath geometric(cfg.base_distribution().distribution(), cfg.target, schedule);

  std::vector<std::pair<double, double>> points;  // (t, lambda)
  if (!h.lambdas.empty()) {
    for (double l : h.lambdas) points.emplace_back(schedule.time_for_lambda(l), l);
  } else {
    for (double t : h.times) points.emplace_back(t, schedule.lambda(t));
  }
  std::vector<double> grid(h.x_points);
  for (std::size_t i = 0; i < h.x_points; ++i) {
    grid[i] = h.x_min + (h.x_max - h.x_min) * static_cast<double>(i) / static_cast<double>(h.x_points - 1);
  }

  Heatmap out;
  std::ostringstream os;
  os << "record,path,t,lambda,x,value\n";
  std::ostringstream modes;
  auto emit = [&](const char* which, double t, double lambda, const std::vector<double>& dens) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      os << "density," << which << ',' << format_double(t) << ',' << format_double(lambda) << ','
         << format_double(grid[i]) << ',' << format_double(dens[i]) << '\n';
    }
    const std::size_t count = mode_count(dens, h.prominence);
    modes << "mode_count," << which << ',' << format_double(t) << ',' << format_double(lambda) << ",," << count << '\n';
    out.modes.push_back({{"path", which}, {"t", t}, {"lambda", lambda}, {"modes", count}});
  };
  for (const auto& [t, lambda] : points) {
    std::vector<double> dens(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      dens[i] = path.marginal_density_at(lambda, Vector::Constant(1, grid[i]));
    }
    emit("diffusion", t, lambda, dens);
    if (h.geometric) emit("geometric", t, lambda, geometric.normalized_density_on_grid(lambda, grid));
  }
  out.csv = os.str() + modes.str();
  return out;
}

json schedule_constant_json(const Schedule& s, ScheduleCondition c) {
  const double v = schedule_constant(s, c);
  return {{"value", num(v)}, {"finite", std::isfinite(v)}};
}

std::uint64_t seed_for(const ExperimentConfig& cfg, std::size_t j) { return cfg.seed + j; }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Matrix read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read samples file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kIo, "samples file '" + path + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "chain") {
    fail(ErrorCode::kIo, "samples file '" + path + "' must start with a 'chain,x1,...' header");
  }
  const std::size_t d = header.size() - 1;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k > 0) {
        try {
          values.push_back(std::stod(cell));
        } catch (const std::exception&) {
          fail(ErrorCode::kIo, "bad number '" + cell + "' in '" + path + "' row " + std::to_string(rows + 2));
        }
      }
      ++k;
    }
    if (k != d + 1) fail(ErrorCode::kIo, "wrong column count in '" + path + "' row " + std::to_string(rows + 2));
    ++rows;
  }
  if (rows == 0) fail(ErrorCode::kIo, "samples file '" + path + "' has no rows");
  Matrix out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < d; ++j) out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(r)) = values[r * d + j];
  }
  return out;
}

json targets_validate(const std::string& path, std::uint64_t seed) {
  const TargetPtr target = load_target_config(path);
  const SmoothnessReport rep = analyze_smoothness(*target, seed);
  json pairs = json::array();
  for (const PairDiagnostic& p : rep.pairs) {
    pairs.push_back({{"pair", {p.i + 1, p.j + 1}},
                     {"zero_set_nonempty", p.zero_set_nonempty},
                     {"passes", p.passes},
                     {"candidates", p.candidates},
                     {"rescued_null", p.rescued_null},
                     {"rescued_mean", p.rescued_mean},
                     {"rescued_third", p.rescued_third},
                     {"reason", p.reason}});
  }
  json failed = json::array();
  for (const auto& [i, j] : rep.failed_pairs) failed.push_back({i + 1, j + 1});
  json out = {
      {"kind", target->kind()},
      {"dim", target->dim()},
      {"lipschitz_ok", rep.lipschitz_ok},
      {"L_pi", num(rep.L_pi)},
      {"L_pi_method", rep.L_pi_method},
      {"strongly_convex_outside_ball", rep.strongly_convex_outside_ball},
      {"M_pi", num(rep.M_pi)},
      {"r", num(rep.r)},
      {"convexity_method", rep.convexity_method},
      {"C_pi", opt_num(rep.C_pi)},
      {"failed_pairs", failed},
      {"pairs", pairs},
      {"warnings", rep.warnings},
      {"mean", vector_json(target->mean())},
      {"covariance", matrix_json(target->covariance())},
      {"second_moment", num(target->second_moment())},
  };
  if (rep.strongly_convex_outside_ball && rep.M_pi > 0.0 && std::isfinite(rep.L_pi) && std::isfinite(rep.r)) {
    out["lsi_constant_bound"] = num(lsi_constant_bound(rep.M_pi, rep.L_pi, rep.r));
  } else {
    out["lsi_constant_bound"] = nullptr;
  }
  return out;
}

json schedules_check(const std::string& path) {
  const ExperimentConfig cfg = load_experiment_config(path);
  const Schedule s = cfg.make_schedule();
  return {
      {"family", s.family_name()},
      {"phi", s.phi()},
      {"horizon", s.horizon()},
      {"lambda_start", s.lambda(0.0)},
      {"lambda_end", s.lambda(s.horizon())},
      {"A5", schedule_constant_json(s, ScheduleCondition::kA5Log)},
      {"A7", schedule_constant_json(s, ScheduleCondition::kA7Sqrt)},
  };
}

json paths_heatmap(const ExperimentConfig& cfg) {
  if (!cfg.diagnostics.heatmap.enabled) fail(ErrorCode::kConfig, "config key 'diagnostics.heatmap': missing or disabled");
  check_writable(cfg.out_dir);
  const Heatmap h = build_heatmap(cfg);
  Staged staged;
  staged.add("heatmap.csv", h.csv);
  staged.commit(cfg.out_dir);
  return {{"file", (fs::path(cfg.out_dir) / "heatmap.csv").string()}, {"mode_counts", h.modes}};
}

json run_experiment(const ExperimentConfig& cfg) {
  const Stopwatch total;
  check_writable(cfg.out_dir);
  const DiffusionPath path = configured_path(cfg);
  const SamplerConfig& sc = cfg.sampler.config;
  validate_sampler_config(sc);

  const Stopwatch sampler_clock;
  const Trajectory tr = dalmc_run(path, sc, make_oracle(path, cfg, sc, cfg.sampler.perturbation));
  const double sampler_seconds = sampler_clock.seconds();

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["config"] = config_echo(cfg);
  double min_ess = kInf;
  for (double e : tr.mean_ess) {
    if (std::isfinite(e)) min_ess = std::min(min_ess, e);
  }
  report["run"] = {{"chains", tr.chains},
                   {"steps", tr.steps},
                   {"flagged_chains", tr.flagged_chains.size()},
                   {"oracle_mode", tr.oracle_mode},
                   {"implied_eps_score", num(tr.implied_eps_score)},
                   {"min_mean_ess", num(min_ess)},
                   {"total_time", num(tr.times.back())}};

  const Stopwatch diag_clock;
  if (cfg.diagnostics.bounds) {
    const BoundChecks checks = bound_checks(path, cfg, tr);
    report["bounds"] = checks.rows;
    report["bounds_skipped"] = checks.skipped;
    bool all = true;
    for (const auto& row : checks.rows) all = all && row["pass"].get<bool>();
    report["all_bounds_pass"] = all;
  }
  if (cfg.diagnostics.metrics) {
    const SampleMetrics m = sample_metrics(*cfg.target, tr.final_samples,
                                           reference_size(cfg, static_cast<std::size_t>(tr.final_samples.cols())),
                                           cfg.seed, cfg.diagnostics.kl_bandwidth);
    report["metrics"] = m.battery;
  }
  Staged staged;
  staged.add("samples.csv", samples_csv(tr));
  if (cfg.diagnostics.heatmap.enabled) {
    const Heatmap h = build_heatmap(cfg);
    staged.add("heatmap.csv", h.csv);
    report["heatmap"] = {{"file", "heatmap.csv"}, {"mode_counts", h.modes}};
  }
  report["timing"] = {{"sampler_seconds", sampler_seconds},
                      {"diagnostics_seconds", diag_clock.seconds()},
                      {"total_seconds", total.seconds()}};
  staged.add("report.json", report.dump(2) + "\n");
  staged.commit(cfg.out_dir);
  return report;
}

json run_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep) fail(ErrorCode::kConfig, "config key 'sweep': missing required table");
  const SweepSpec& sw = *cfg.sweep;
  if (sw.values.empty()) fail(ErrorCode::kConfig, "config key 'sweep.values': must not be empty");
  check_writable(cfg.out_dir);
  const DiffusionPath path = configured_path(cfg);
  const int d = path.dim();

  std::ostringstream os;
  os << "axis,value,seeds,w2,w2_se,kl,kl_se,flagged\n";
  json rows = json::array();
  for (double value : sw.values) {
    SamplerConfig sc = cfg.sampler.config;
    ScorePerturbation pert = cfg.sampler.perturbation;
    switch (sw.axis) {
      case SweepAxis::kSteps: sc.steps = static_cast<std::size_t>(value); break;
      case SweepAxis::kKappa: sc.kappa = value; break;
      case SweepAxis::kEpsScore:
        pert = value == 0.0 ? ScorePerturbation::none()
                            : ScorePerturbation::additive_bias(Vector::Constant(d, value / std::sqrt(static_cast<double>(d))));
        break;
    }
    std::vector<double> w2s, kls;
    std::size_t flagged = 0;
    for (std::size_t j = 0; j < sw.seeds; ++j) {
      sc.seed = seed_for(cfg, j);
      validate_sampler_config(sc);
      const Trajectory tr = dalmc_run(path, sc, make_oracle(path, cfg, sc, pert));
      flagged += tr.flagged_chains.size();
      const SampleMetrics m = sample_metrics(*cfg.target, tr.final_samples,
                                             reference_size(cfg, static_cast<std::size_t>(tr.final_samples.cols())),
                                             sc.seed, cfg.diagnostics.kl_bandwidth);
      w2s.push_back(m.w2);
      kls.push_back(m.kl);
    }
    auto mean_se = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
      return std::pair{mean, se};
    };
    const auto [w2, w2_se] = mean_se(w2s);
    const auto [kl, kl_se] = mean_se(kls);
    os << sweep_axis_name(sw.axis) << ',' << format_double(value) << ',' << sw.seeds << ',' << format_double(w2) << ','
       << format_double(w2_se) << ',' << format_double(kl) << ',' << format_double(kl_se) << ',' << flagged << '\n';
    rows.push_back({{"value", value}, {"w2", num(w2)}, {"w2_se", num(w2_se)}, {"kl", num(kl)}, {"kl_se", num(kl_se)},
                    {"flagged", flagged}});
  }
  Staged staged;
  staged.add("sweep.csv", os.str());
  staged.commit(cfg.out_dir);
  return {{"axis", sweep_axis_name(sw.axis)}, {"seeds", sw.seeds}, {"rows", rows},
          {"file", (fs::path(cfg.out_dir) / "sweep.csv").string()}};
}

json diagnostics_compare(const std::string& samples_path, const std::string& target_config, std::uint64_t seed) {
  const TargetPtr target = load_target_config(target_config);
  const Matrix samples = read_samples_csv(samples_path);
  if (samples.rows() != target->dim()) {
    fail(ErrorCode::kDimensionMismatch, "samples have " + std::to_string(samples.rows()) +
                                            " coordinates but the target has " + std::to_string(target->dim()));
  }
  const SampleMetrics m = sample_metrics(*target, samples, static_cast<std::size_t>(samples.cols()), seed, std::nullopt);
  json out = m.battery;
  out["samples"] = samples.cols();
  out["target"] = target->kind();
  return out;
}

json theory_plan(const json& params) {
  auto get = [&](const char* k) -> std::optional<double> {
    if (!params.contains(k) || params[k].is_null()) return std::nullopt;
    if (!params[k].is_number()) fail(ErrorCode::kInvalidArgument, std::string("planner parameter '") + k + "' must be a number");
    return params[k].get<double>();
  };
  PlannerInput in;
  double horizon = get("horizon").value_or(1.0);
  std::optional<double> int_l2 = get("int_L2");
  json derived = json::object();
  if (params.contains("config") && params["config"].is_string()) {
    const ExperimentConfig cfg = load_experiment_config(params["config"].get<std::string>());
    const DiffusionPath path = configured_path(cfg);
    in.eps = cfg.theory.eps;
    in.d = path.dim();
    in.M2 = path.target().second_moment();
    horizon = path.schedule().horizon();
    const LipschitzProfile prof = lipschitz_profile(path, cfg.diagnostics.profile_points);
    in.L_max = prof.max;
    if (!int_l2) int_l2 = integrate_l2(prof);
    const SmoothnessConstants c = path.constants().value_or(SmoothnessConstants{});
    in.L_pi = c.L_pi;
    if (cfg.base.kind == BaseKind::kStudentT) in.alpha = cfg.base.alpha;
    derived = {{"d", in.d}, {"M2", num(in.M2)}, {"L_max", num(*in.L_max)}, {"L_pi", opt_num(in.L_pi)}};
  }
  if (auto v = get("eps")) in.eps = *v;
  if (auto v = get("d")) {
    if (*v < 1.0 || *v != std::floor(*v)) fail(ErrorCode::kInvalidArgument, "planner parameter 'd' must be a positive integer");
    in.d = static_cast<int>(*v);
  }
  if (auto v = get("M2")) in.M2 = *v;
  if (auto v = get("L_max")) in.L_max = v;
  if (auto v = get("L_pi")) in.L_pi = v;
  if (auto v = get("K_pi")) in.K_pi = v;
  if (auto v = get("alpha")) in.alpha = v;
  const double eps_score = get("eps_score").value_or(0.0);
  validate_planner_input(in);

  auto plan_json = [](const Plan& p) {
    json j = {{"kappa", p.kappa}, {"steps", num(p.steps)}, {"kappa_clamped", p.kappa_clamped}};
    if (p.alpha_factor) j["alpha_factor"] = num(*p.alpha_factor);
    return j;
  };
  json out = {{"eps", in.eps}, {"d", in.d}, {"M2", in.M2}};
  if (!derived.empty()) out["derived_from_config"] = derived;
  json plans = json::object();
  json skipped = json::object();
  auto attempt = [&](const char* name, auto&& planner) {
    try {
      plans[name] = plan_json(planner(in));
    } catch (const Error& e) {
      skipped[name] = e.what();
    }
  };
  attempt("gaussian", plan_gaussian);
  attempt("relaxed", plan_relaxed);
  attempt("heavy", plan_heavy);
  if (plans.contains("gaussian")) {
    const double L = *in.L_max;
    const double l2 = int_l2.value_or(horizon * L * L);
    const double kappa = plans["gaussian"]["kappa"].get<double>();
    const double steps = plans["gaussian"]["steps"].get<double>();
    out["kl_rhs"] = {{"value", num(kl_rhs_gaussian(kappa, steps, L, in.M2, in.d, l2, eps_score))},
                     {"int_L2", num(l2)},
                     {"eps_score", eps_score},
                     {"over_eps_sq", num(kl_rhs_gaussian(kappa, steps, L, in.M2, in.d, l2, eps_score) / (in.eps * in.eps))}};
  }
  out["plans"] = plans;
  if (!skipped.empty()) out["skipped"] = skipped;
  return out;
}

}  // namespace dalmc
