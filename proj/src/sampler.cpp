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

#include "dalmc/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/interpolators/cubic_hermite.hpp>

namespace dalmc {

namespace {

constexpr double kBlowUpNorm = 1e6;
constexpr std::size_t kTableNodes = 256;
constexpr double kTableReach = 1000.0;  // table covers centre +- reach * marginal scale
constexpr std::uint64_t kOracleStream = 0x6a09e667f3bcc909ULL;

// Runs body(i) for i in [0, n) over `threads` workers in contiguous blocks and
// rethrows the first exception.
template <class F>
void parallel_blocks(std::size_t n, int threads, F&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) body(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::string step_plan_name(StepPlan plan) {
  return plan == StepPlan::kUniform ? "uniform" : "lipschitz-adaptive";
}

StepPlan step_plan_from_name(const std::string& name) {
  if (name == "uniform") return StepPlan::kUniform;
  if (name == "lipschitz-adaptive" || name == "adaptive") return StepPlan::kLipschitzAdaptive;
  fail(ErrorCode::kConfig, "unknown step plan '" + name + "' (expected uniform or lipschitz-adaptive)");
}

std::vector<double> step_size_plan(double horizon, double kappa, std::size_t steps, StepPlan mode,
                                   const LipschitzProfile* profile) {
  if (steps < 1) fail(ErrorCode::kInvalidArgument, "step count must be at least 1");
  if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorCode::kInvalidArgument, "kappa must lie in (0, 1)");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::kInvalidArgument, "horizon must be positive");
  const double total = horizon / kappa;
  std::vector<double> h(steps, total / static_cast<double>(steps));
  if (mode == StepPlan::kUniform) return h;

  if (!profile) fail(ErrorCode::kInvalidArgument, "adaptive step plan needs a Lipschitz profile");
  const auto& ts = profile->times;
  const auto& ls = profile->bounds;
  if (ts.size() < 2 || ts.size() != ls.size()) fail(ErrorCode::kInvalidArgument, "malformed Lipschitz profile");
  for (double v : ls) {
    if (!std::isfinite(v)) fail(ErrorCode::kDomain, "Lipschitz profile has an infinite entry");
    if (!(v > 0.0)) fail(ErrorCode::kDomain, "Lipschitz profile has a non-positive entry");
  }
  // Cumulative integral of the left-value step function.
  std::vector<double> mass(ts.size(), 0.0);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) mass[i + 1] = mass[i] + ls[i] * (ts[i + 1] - ts[i]);
  const double full = mass.back();
  std::vector<double> cuts(steps + 1);
  cuts.front() = ts.front();
  cuts.back() = ts.back();
  std::size_t seg = 0;
  for (std::size_t k = 1; k < steps; ++k) {
    const double m = full * static_cast<double>(k) / static_cast<double>(steps);
    while (seg + 2 < ts.size() && mass[seg + 1] < m) ++seg;
    cuts[k] = ts[seg] + (m - mass[seg]) / ls[seg];
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    h[k] = cuts[k + 1] - cuts[k];
    if (!(h[k] > 0.0)) fail(ErrorCode::kNumerical, "adaptive plan produced a non-positive step");
    sum += h[k];
  }
  for (double& v : h) v *= total / sum;
  return h;
}

ScorePerturbation ScorePerturbation::additive_bias(Vector b) {
  ScorePerturbation p;
  p.kind = Kind::kBias;
  p.bias = std::move(b);
  return p;
}

ScorePerturbation ScorePerturbation::gaussian_noise(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) fail(ErrorCode::kInvalidArgument, "noise level must be non-negative");
  ScorePerturbation p;
  p.kind = Kind::kNoise;
  p.tau = tau;
  return p;
}

std::string ScorePerturbation::name() const {
  switch (kind) {
    case Kind::kNone: return "none";
    case Kind::kBias: return "additive-bias";
    case Kind::kNoise: return "gaussian-noise";
  }
  return "unknown";
}

struct ScoreOracle::Cache {
  enum class Kind { kClosed, kTable, kSnis };
  struct Step {
    Kind kind = Kind::kSnis;
    double lambda = 0.0;
    TargetPtr closed;
    std::unique_ptr<boost::math::interpolators::cubic_hermite<std::vector<double>>> table;
    double lo = 0.0;
    double hi = 0.0;
  };
  std::vector<Step> steps;
  OracleMode mode = OracleMode::kDirect;
};

ScoreOracle::ScoreOracle(DiffusionPath path, double kappa, ScoreOptions options, ScorePerturbation perturbation)
    : path_(std::move(path)), kappa_(kappa), options_(options), perturbation_(std::move(perturbation)) {
  if (!(kappa > 0.0 && kappa <= 1.0)) fail(ErrorCode::kInvalidArgument, "kappa must lie in (0, 1]");
  if (perturbation_.kind == ScorePerturbation::Kind::kBias && perturbation_.bias.size() != path_.dim()) {
    fail(ErrorCode::kDimensionMismatch, "bias dimension differs from path dimension");
  }
}

ScoreEstimate ScoreOracle::exact(const Vector& x, double t, std::uint64_t seed) const {
  const double horizon = path_.schedule().horizon();
  const double lambda = path_.lambda(std::clamp(kappa_ * t, 0.0, horizon));
  ScoreOptions opts = options_;
  opts.seed = seed;
  return path_.marginal_score_at(lambda, x, opts);
}

void ScoreOracle::apply_perturbation(Vector& s, Rng& rng) const {
  switch (perturbation_.kind) {
    case ScorePerturbation::Kind::kNone: return;
    case ScorePerturbation::Kind::kBias: s += perturbation_.bias; return;
    case ScorePerturbation::Kind::kNoise: {
      if (perturbation_.tau == 0.0) return;
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < s.size(); ++i) s(i) += perturbation_.tau * normal(rng);
      return;
    }
  }
}

Vector ScoreOracle::operator()(const Vector& x, double t, std::uint64_t seed, Rng& rng) const {
  Vector s = exact(x, t, seed).score;
  apply_perturbation(s, rng);
  return s;
}

double ScoreOracle::implied_eps_score_sq() const {
  const double length = path_.schedule().horizon() / kappa_;
  switch (perturbation_.kind) {
    case ScorePerturbation::Kind::kNone: return 0.0;
    case ScorePerturbation::Kind::kBias: return length * perturbation_.bias.squaredNorm();
    case ScorePerturbation::Kind::kNoise: return length * path_.dim() * perturbation_.tau * perturbation_.tau;
  }
  return 0.0;
}

double ScoreOracle::implied_eps_score() const { return std::sqrt(implied_eps_score_sq()); }

void ScoreOracle::prepare(const std::vector<double>& times, OracleMode mode, int threads) {
  auto cache = std::make_shared<Cache>();
  const bool one_d = path_.dim() == 1;
  const bool quad_ok = options_.method == ScoreMethod::kAuto || options_.method == ScoreMethod::kQuadrature;
  if (mode == OracleMode::kAuto) mode = (one_d && quad_ok) ? OracleMode::kTabulated : OracleMode::kDirect;
  if (mode == OracleMode::kTabulated && !one_d) fail(ErrorCode::kInvalidArgument, "tabulated oracle needs d = 1");
  cache->mode = mode;
  cache->steps.resize(times.size());
  const double horizon = path_.schedule().horizon();
  const bool force_closed = options_.method == ScoreMethod::kClosedForm;

  double t_mean = 0.0, t_var = 1.0;
  if (one_d) {
    try {
      t_mean = path_.target().mean()(0);
      t_var = path_.target().covariance()(0, 0);
    } catch (const Error&) {
    }
    if (!std::isfinite(t_mean) || !std::isfinite(t_var)) t_mean = 0.0, t_var = 1.0;
  }
  const double base_var = path_.base().noise_second_moment() / path_.dim();

  parallel_blocks(times.size(), threads, [&](std::size_t l, std::size_t) {
    Cache::Step& st = cache->steps[l];
    st.lambda = path_.lambda(std::clamp(kappa_ * times[l], 0.0, horizon));
    const bool can_closed = options_.method == ScoreMethod::kAuto || force_closed;
    if (mode != OracleMode::kDirect && can_closed) st.closed = path_.closed_form_marginal(st.lambda);
    if (st.closed) {
      st.kind = Cache::Kind::kClosed;
      return;
    }
    if (mode != OracleMode::kTabulated) {
      st.kind = Cache::Kind::kSnis;
      return;
    }
    st.kind = Cache::Kind::kTable;
    const double centre = std::sqrt(st.lambda) * t_mean;
    const double scale = std::sqrt(st.lambda * t_var + (1.0 - st.lambda) * base_var);
    const double umax = std::asinh(kTableReach);
    std::vector<double> xs(kTableNodes), ys(kTableNodes), dys(kTableNodes);
    for (std::size_t i = 0; i < kTableNodes; ++i) {
      const double u = -umax + 2.0 * umax * static_cast<double>(i) / static_cast<double>(kTableNodes - 1);
      xs[i] = centre + scale * std::sinh(u);
      const QuadratureResult q = marginal_quadrature_1d(path_, st.lambda, xs[i], true);
      ys[i] = q.score;
      dys[i] = q.hessian;
    }
    st.lo = xs.front();
    st.hi = xs.back();
    st.table = std::make_unique<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
        std::move(xs), std::move(ys), std::move(dys));
  });
  cache_ = std::move(cache);
}

std::string ScoreOracle::mode_name() const {
  if (!cache_) return "unprepared";
  bool table = false, direct = false;
  for (const auto& st : cache_->steps) {
    table = table || st.kind == Cache::Kind::kTable;
    direct = direct || st.kind == Cache::Kind::kSnis;
  }
  if (table) return "tabulated";
  return direct ? "direct" : "closed_form";
}

void ScoreOracle::at_step(std::size_t l, const Vector& x, std::uint64_t seed, Rng& rng, Vector& out,
                          double* ess) const {
  if (!cache_) fail(ErrorCode::kRuntime, "score oracle used before prepare()");
  const Cache::Step& st = cache_->steps.at(l);
  if (ess) *ess = std::numeric_limits<double>::quiet_NaN();
  switch (st.kind) {
    case Cache::Kind::kClosed:
      st.closed->evaluate(x, &out, nullptr);
      break;
    case Cache::Kind::kTable: {
      const double v = x(0);
      out.resize(1);
      if (v >= st.lo && v <= st.hi) {
        out(0) = (*st.table)(v);
      } else {
        out(0) = marginal_quadrature_1d(path_, st.lambda, v, true).score;
      }
      break;
    }
    case Cache::Kind::kSnis: {
      ScoreOptions opts = options_;
      opts.seed = seed;
      const ScoreEstimate est = path_.marginal_score_at(st.lambda, x, opts);
      out = est.score;
      if (ess && est.method == ScoreMethod::kSnis) *ess = est.ess;
      break;
    }
  }
  apply_perturbation(out, rng);
}

ScoreOracle perturb_score(const ScoreOracle& oracle, const ScorePerturbation& perturbation) {
  return ScoreOracle(oracle.path(), oracle.kappa(), oracle.options(), perturbation);
}

void validate_sampler_config(const SamplerConfig& c) {
  if (!(c.kappa > 0.0 && c.kappa < 1.0)) fail(ErrorCode::kConfig, "sampler.kappa must lie in (0, 1)");
  if (c.steps < 1) fail(ErrorCode::kConfig, "sampler.steps must be at least 1");
  if (c.chains < 1) fail(ErrorCode::kConfig, "sampler.chains must be at least 1");
  if (c.threads < 1) fail(ErrorCode::kConfig, "threads must be at least 1");
}

Trajectory dalmc_run(const DiffusionPath& path, const SamplerConfig& config) {
  return dalmc_run(path, config, ScoreOracle(path, config.kappa));
}

Trajectory dalmc_run(const DiffusionPath& path, const SamplerConfig& config, ScoreOracle oracle) {
  validate_sampler_config(config);
  if (std::abs(oracle.kappa() - config.kappa) > 1e-15) fail(ErrorCode::kInvalidArgument, "oracle kappa differs from config");
  const double horizon = path.schedule().horizon();
  const std::size_t m = config.steps;
  const std::size_t n = config.chains;
  const int d = path.dim();

  Trajectory tr;
  tr.chains = n;
  tr.steps = m;
  if (config.step_plan == StepPlan::kLipschitzAdaptive) {
    const LipschitzProfile prof = lipschitz_profile(path, config.profile_points);
    tr.step_sizes = step_size_plan(horizon, config.kappa, m, config.step_plan, &prof);
  } else {
    tr.step_sizes = step_size_plan(horizon, config.kappa, m, config.step_plan);
  }
  tr.times.resize(m + 1);
  tr.times[0] = 0.0;
  for (std::size_t l = 0; l < m; ++l) tr.times[l + 1] = tr.times[l] + tr.step_sizes[l];
  tr.times[m] = horizon / config.kappa;

  oracle.prepare(std::vector<double>(tr.times.begin(), tr.times.end() - 1), config.oracle_mode, config.threads);
  tr.oracle_mode = oracle.mode_name();
  tr.implied_eps_score = oracle.implied_eps_score();

  const std::size_t every = config.record_every == 0 ? m : config.record_every;
  for (std::size_t l = 0; l < m; l += every) tr.recorded_steps.push_back(l);
  tr.recorded_steps.push_back(m);
  std::vector<std::size_t> record_slot(m + 1, SIZE_MAX);
  for (std::size_t k = 0; k < tr.recorded_steps.size(); ++k) record_slot[tr.recorded_steps[k]] = k;
  tr.recorded_states.assign(tr.recorded_steps.size(), Matrix::Constant(d, static_cast<Eigen::Index>(n),
                                                                      std::numeric_limits<double>::quiet_NaN()));

  const TargetPtr base = path.base().distribution();
  const std::size_t workers = static_cast<std::size_t>(std::max(1, config.threads));
  std::vector<std::vector<double>> ess_sum(workers, std::vector<double>(m, 0.0));
  std::vector<std::vector<std::size_t>> ess_count(workers, std::vector<std::size_t>(m, 0));
  std::vector<char> flagged(n, 0);
  const std::uint64_t oracle_seed = derive_seed(config.seed, kOracleStream);

  parallel_blocks(n, config.threads, [&](std::size_t c, std::size_t w) {
    Rng rng = make_rng(config.seed, c);
    Matrix x0(d, 1);
    base->sample_into(rng, x0);
    Vector x = x0.col(0);
    Vector s(d);
    std::normal_distribution<double> normal;
    const auto col = static_cast<Eigen::Index>(c);
    if (record_slot[0] != SIZE_MAX) tr.recorded_states[record_slot[0]].col(col) = x;
    for (std::size_t l = 0; l < m; ++l) {
      double ess = std::numeric_limits<double>::quiet_NaN();
      oracle.at_step(l, x, derive_seed(oracle_seed, static_cast<std::uint64_t>(l) * n + c), rng, s, &ess);
      if (!std::isnan(ess)) {
        ess_sum[w][l] += ess;
        ++ess_count[w][l];
      }
      const double h = tr.step_sizes[l];
      const double noise_scale = std::sqrt(2.0 * h);
      for (int k = 0; k < d; ++k) x(k) += h * s(k) + noise_scale * normal(rng);
      if (!x.allFinite() || x.norm() > kBlowUpNorm) {
        flagged[c] = 1;
        return;
      }
      if (record_slot[l + 1] != SIZE_MAX) tr.recorded_states[record_slot[l + 1]].col(col) = x;
    }
  });

  std::size_t flagged_count = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (flagged[c]) {
      tr.flagged_chains.push_back(c);
      ++flagged_count;
    }
  }
  if (static_cast<double>(flagged_count) > 0.01 * static_cast<double>(n)) {
    std::ostringstream os;
    os << flagged_count << " of " << n << " chains diverged (state norm above " << kBlowUpNorm
       << " or non-finite); more than 1% flagged";
    fail(ErrorCode::kNumerical, os.str());
  }
  tr.final_samples.resize(d, static_cast<Eigen::Index>(n - flagged_count));
  Eigen::Index out = 0;
  const Matrix& last = tr.recorded_states.back();
  for (std::size_t c = 0; c < n; ++c) {
    if (!flagged[c]) tr.final_samples.col(out++) = last.col(static_cast<Eigen::Index>(c));
  }
  tr.mean_ess.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t l = 0; l < m; ++l) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t w = 0; w < workers; ++w) {
      sum += ess_sum[w][l];
      cnt += ess_count[w][l];
    }
    if (cnt > 0) tr.mean_ess[l] = sum / static_cast<double>(cnt);
  }
  return tr;
}

}  // namespace dalmc
