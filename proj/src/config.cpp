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

#include "dalmc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace dalmc {

namespace {

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  fail(ErrorCode::kConfig, "config key '" + key + "': " + what);
}

// A table plus its dotted path; remembers which keys were read so that
// typos surface as errors instead of silently falling back to defaults.
class Section {
 public:
  Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

  bool present() const { return table_ != nullptr; }
  const std::string& path() const { return path_; }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) {
    used_.insert(k);
    return table_ && table_->contains(k);
  }

  const toml::node* node(const std::string& k) {
    used_.insert(k);
    return table_ ? table_->get(k) : nullptr;
  }

  const toml::node& require(const std::string& k) {
    const toml::node* n = node(k);
    if (!n) key_error(key(k), "missing required key");
    return *n;
  }

  double number(const std::string& k) { return as_number(require(k), key(k)); }
  double number(const std::string& k, double fallback) {
    const toml::node* n = node(k);
    return n ? as_number(*n, key(k)) : fallback;
  }

  std::int64_t integer(const std::string& k, std::int64_t fallback) {
    const toml::node* n = node(k);
    if (!n) return fallback;
    if (auto v = n->value_exact<std::int64_t>()) return *v;
    key_error(key(k), "expected an integer");
  }

  std::size_t count(const std::string& k, std::size_t fallback, std::size_t minimum = 0) {
    const std::int64_t v = integer(k, static_cast<std::int64_t>(fallback));
    if (v < static_cast<std::int64_t>(minimum)) key_error(key(k), "must be at least " + std::to_string(minimum));
    return static_cast<std::size_t>(v);
  }

  bool boolean(const std::string& k, bool fallback) {
    const toml::node* n = node(k);
    if (!n) return fallback;
    if (auto v = n->value_exact<bool>()) return *v;
    key_error(key(k), "expected true or false");
  }

  std::string string(const std::string& k) {
    const toml::node& n = require(k);
    if (auto v = n.value_exact<std::string>()) return *v;
    key_error(key(k), "expected a string");
  }
  std::string string(const std::string& k, const std::string& fallback) {
    return has(k) ? string(k) : fallback;
  }

  std::vector<double> numbers(const std::string& k) { return as_numbers(require(k), key(k)); }

  Vector vector(const std::string& k) {
    const toml::node& n = require(k);
    if (n.is_number()) return Vector::Constant(1, as_number(n, key(k)));
    const std::vector<double> v = as_numbers(n, key(k));
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  Matrix matrix(const std::string& k) {
    const toml::node& n = require(k);
    if (n.is_number()) return Matrix::Constant(1, 1, as_number(n, key(k)));
    const toml::array* rows = n.as_array();
    if (!rows || rows->empty()) key_error(key(k), "expected a non-empty array of rows");
    std::vector<std::vector<double>> parsed;
    for (std::size_t i = 0; i < rows->size(); ++i) {
      parsed.push_back(as_numbers(*rows->get(i), key(k) + "[" + std::to_string(i) + "]"));
    }
    const std::size_t c = parsed.front().size();
    Matrix m(static_cast<Eigen::Index>(parsed.size()), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (parsed[i].size() != c) key_error(key(k), "rows have different lengths");
      for (std::size_t j = 0; j < c; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parsed[i][j];
    }
    return m;
  }

  Section sub(const std::string& k) {
    const toml::node* n = node(k);
    if (n && !n->is_table()) key_error(key(k), "expected a table");
    return Section(n ? n->as_table() : nullptr, key(k));
  }

  std::vector<Section> table_array(const std::string& k) {
    const toml::node& n = require(k);
    const toml::array* arr = n.as_array();
    if (!arr || arr->empty() || !arr->is_array_of_tables()) key_error(key(k), "expected a non-empty array of tables");
    std::vector<Section> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out.emplace_back(arr->get(i)->as_table(), key(k) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  // Rejects keys outside `allowed` before anything else is read.
  void allow(std::initializer_list<const char*> allowed) const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string name(k.str());
      bool ok = false;
      for (const char* a : allowed) ok = ok || name == a;
      if (!ok) key_error(key(name), "unknown key");
    }
  }

  // Every key present in the table must have been read.
  void finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string name(k.str());
      if (!used_.count(name)) key_error(key(name), "unknown key");
    }
  }

  static double as_number(const toml::node& n, const std::string& key) {
    if (auto v = n.value_exact<double>()) return *v;
    if (auto v = n.value_exact<std::int64_t>()) return static_cast<double>(*v);
    if (auto s = n.value_exact<std::string>()) {
      if (*s == "inf" || *s == "+inf") return std::numeric_limits<double>::infinity();
    }
    key_error(key, "expected a number");
  }

  static std::vector<double> as_numbers(const toml::node& n, const std::string& key) {
    const toml::array* arr = n.as_array();
    if (!arr || arr->empty()) key_error(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr->size(); ++i) out.push_back(as_number(*arr->get(i), key + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  const toml::table* table_;
  std::string path_;
  std::set<std::string> used_;
};

toml::table parse_toml(const std::string& text, const std::string& source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    fail(ErrorCode::kConfig, os.str());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs `build`, re-raising library errors with the key that produced them.
template <class F>
auto with_key(const std::string& key, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    key_error(key, e.what());
  }
}

Matrix component_covariance(Section& s, int dim) {
  const bool cov = s.has("covariance");
  const bool var = s.has("variance");
  const bool prec = s.has("precision");
  if (static_cast<int>(cov) + static_cast<int>(var) + static_cast<int>(prec) != 1) {
    key_error(s.key("covariance"), "give exactly one of covariance, variance, precision");
  }
  Matrix c;
  if (var) {
    const double v = s.number("variance");
    if (!(v > 0.0)) key_error(s.key("variance"), "must be positive");
    c = v * Matrix::Identity(dim, dim);
  } else if (cov) {
    c = s.matrix("covariance");
  } else {
    const Matrix p = s.matrix("precision");
    if (p.rows() != p.cols()) key_error(s.key("precision"), "must be square");
    Eigen::LLT<Matrix> llt(p);
    if (llt.info() != Eigen::Success) key_error(s.key("precision"), "must be symmetric positive definite");
    c = llt.solve(Matrix::Identity(p.rows(), p.cols()));
  }
  const std::string k = s.key(var ? "variance" : cov ? "covariance" : "precision");
  if (c.rows() != dim || c.cols() != dim) key_error(k, "dimension differs from the mean");
  return c;
}

TargetPtr build_target(Section& s) {
  if (!s.present()) key_error("target", "missing required table");
  const std::string kind = s.string("kind");
  if (kind == "gaussian") s.allow({"kind", "mean", "covariance", "variance", "precision"});
  if (kind == "gaussian_mixture") s.allow({"kind", "components"});
  if (kind == "student_t") s.allow({"kind", "dof", "location", "scale", "sigma", "dim"});
  if (kind == "smoothed_uniform") s.allow({"kind", "m", "width"});
  if (kind == "compact_plus_noise") {
    s.allow({"kind", "atoms", "weights", "noise", "tau", "noise_dof", "center", "radius"});
  }
  TargetPtr out;
  if (kind == "gaussian") {
    const Vector mean = s.vector("mean");
    const Matrix cov = component_covariance(s, static_cast<int>(mean.size()));
    out = with_key(s.path(), [&] { return TargetPtr(make_gaussian(mean, cov)); });
  } else if (kind == "gaussian_mixture") {
    std::vector<GaussianComponentSpec> comps;
    for (Section& c : s.table_array("components")) {
      c.allow({"weight", "mean", "covariance", "variance", "precision"});
      GaussianComponentSpec spec;
      spec.weight = c.number("weight");
      spec.mean = c.vector("mean");
      spec.covariance = component_covariance(c, static_cast<int>(spec.mean.size()));
      c.finish();
      comps.push_back(std::move(spec));
    }
    out = with_key(s.key("components"), [&] { return TargetPtr(std::make_shared<GaussianMixture>(comps)); });
  } else if (kind == "student_t") {
    const double dof = s.number("dof");
    if (s.has("location") || s.has("scale")) {
      const Vector loc = s.has("location") ? s.vector("location") : Vector::Zero(1);
      Matrix scale;
      if (s.has("scale")) {
        scale = s.matrix("scale");
      } else {
        const double sigma = s.number("sigma", 1.0);
        scale = sigma * sigma * Matrix::Identity(loc.size(), loc.size());
      }
      if (s.has("dim") && s.integer("dim", 0) != loc.size()) key_error(s.key("dim"), "differs from the location size");
      out = with_key(s.path(), [&] { return TargetPtr(std::make_shared<StudentT>(loc, scale, dof)); });
    } else {
      const std::int64_t dim = s.integer("dim", 1);
      if (dim < 1) key_error(s.key("dim"), "must be at least 1");
      const double sigma = s.number("sigma", 1.0);
      out = with_key(s.path(), [&] { return TargetPtr(StudentT::isotropic(static_cast<int>(dim), sigma, dof)); });
    }
  } else if (kind == "smoothed_uniform") {
    const double m = s.number("m");
    const double width = s.number("width", 1.0);
    out = with_key(s.path(), [&] { return TargetPtr(std::make_shared<SmoothedUniformMixture>(m, width)); });
  } else if (kind == "compact_plus_noise") {
    const toml::node& an = s.require("atoms");
    const toml::array* arr = an.as_array();
    if (!arr || arr->empty()) key_error(s.key("atoms"), "expected a non-empty array");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::node& a = *arr->get(i);
      const std::string k = s.key("atoms") + "[" + std::to_string(i) + "]";
      Atom atom;
      if (a.is_number()) {
        atom.location = Vector::Constant(1, Section::as_number(a, k));
      } else {
        const std::vector<double> v = Section::as_numbers(a, k);
        atom.location = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
      atoms.push_back(std::move(atom));
    }
    if (s.has("weights")) {
      const std::vector<double> w = s.numbers("weights");
      if (w.size() != atoms.size()) key_error(s.key("weights"), "length differs from atoms");
      for (std::size_t i = 0; i < w.size(); ++i) atoms[i].weight = w[i];
    } else {
      for (Atom& a : atoms) a.weight = 1.0 / static_cast<double>(atoms.size());
    }
    const Eigen::Index d = atoms.front().location.size();
    for (const Atom& a : atoms) {
      if (a.location.size() != d) key_error(s.key("atoms"), "atoms have different dimensions");
    }
    const std::string noise_name = s.string("noise", "gaussian");
    NoiseKind noise;
    if (noise_name == "gaussian") {
      noise = NoiseKind::kGaussian;
    } else if (noise_name == "student_t") {
      noise = NoiseKind::kStudentT;
    } else {
      key_error(s.key("noise"), "expected gaussian or student_t");
    }
    const double tau = s.number("tau");
    const double dof = noise == NoiseKind::kStudentT ? s.number("noise_dof") : s.number("noise_dof", 0.0);
    Vector center;
    if (s.has("center")) {
      center = s.vector("center");
      if (center.size() != d) key_error(s.key("center"), "dimension differs from the atoms");
    } else {
      double total = 0.0;
      center = Vector::Zero(d);
      for (const Atom& a : atoms) {
        center += a.weight * a.location;
        total += a.weight;
      }
      center /= total;
    }
    double radius;
    if (s.has("radius")) {
      radius = s.number("radius");
    } else {
      // Smallest R with |U - m|^2 <= d R^2 for every atom.
      double r2 = 0.0;
      for (const Atom& a : atoms) r2 = std::max(r2, (a.location - center).squaredNorm());
      radius = std::sqrt(r2 / static_cast<double>(d));
    }
    out = with_key(s.path(), [&] {
      return TargetPtr(std::make_shared<CompactPlusNoise>(atoms, noise, tau, dof, radius, center));
    });
  } else {
    key_error(s.key("kind"),
              "unknown target kind '" + kind +
                  "' (expected gaussian, gaussian_mixture, student_t, smoothed_uniform, compact_plus_noise)");
  }
  s.finish();
  return out;
}

BaseSpec build_base(Section& s) {
  BaseSpec b;
  if (!s.present()) return b;
  const std::string kind = s.string("kind", "gaussian");
  b.sigma = s.number("sigma", 1.0);
  if (!(b.sigma > 0.0) || !std::isfinite(b.sigma)) key_error(s.key("sigma"), "must be positive and finite");
  if (kind == "gaussian") {
    b.kind = BaseKind::kGaussian;
  } else if (kind == "student_t") {
    b.kind = BaseKind::kStudentT;
    b.alpha = s.number("alpha");
    if (!(b.alpha > 2.0)) key_error(s.key("alpha"), "must exceed 2");
  } else {
    key_error(s.key("kind"), "expected gaussian or student_t");
  }
  s.finish();
  return b;
}

ScheduleSpec build_schedule(Section& s) {
  ScheduleSpec out;
  if (!s.present()) return out;
  out.family = s.string("family", out.family);
  out.phi = s.number("phi", out.phi);
  out.horizon = s.number("horizon", out.horizon);
  with_key(s.path(), [&] { return Schedule::from_name(out.family, out.phi, out.horizon); });
  s.finish();
  return out;
}

OracleMode oracle_from_name(const std::string& name, const std::string& key) {
  if (name == "auto") return OracleMode::kAuto;
  if (name == "direct") return OracleMode::kDirect;
  if (name == "tabulated") return OracleMode::kTabulated;
  key_error(key, "expected auto, direct or tabulated");
}

ScoreMethod method_from_name(const std::string& name, const std::string& key) {
  if (name == "auto") return ScoreMethod::kAuto;
  if (name == "closed_form") return ScoreMethod::kClosedForm;
  if (name == "snis") return ScoreMethod::kSnis;
  if (name == "quadrature") return ScoreMethod::kQuadrature;
  key_error(key, "expected auto, closed_form, snis or quadrature");
}

SamplerSpec build_sampler(Section& s, int dim) {
  SamplerSpec out;
  if (!s.present()) return out;
  SamplerConfig& c = out.config;
  c.kappa = s.number("kappa", c.kappa);
  c.steps = s.count("steps", c.steps, 1);
  c.chains = s.count("chains", c.chains, 1);
  c.record_every = s.count("record_every", c.record_every);
  c.profile_points = s.count("profile_points", c.profile_points, 2);
  if (s.has("step_plan")) {
    const std::string name = s.string("step_plan");
    c.step_plan = with_key(s.key("step_plan"), [&] { return step_plan_from_name(name); });
  }
  if (s.has("oracle")) c.oracle_mode = oracle_from_name(s.string("oracle"), s.key("oracle"));
  if (s.has("score_method")) out.score.method = method_from_name(s.string("score_method"), s.key("score_method"));
  out.score.particles = s.count("particles", out.score.particles, 1);
  out.score.max_particles = s.count("max_particles", out.score.max_particles, 1);
  out.score.ess_floor = s.number("ess_floor", out.score.ess_floor);
  out.score.rel_tol = s.number("rel_tol", out.score.rel_tol);

  Section p = s.sub("perturbation");
  if (p.present()) {
    const std::string kind = p.string("kind", "none");
    if (kind == "none") {
      out.perturbation = ScorePerturbation::none();
    } else if (kind == "bias") {
      Vector b;
      if (p.has("bias")) {
        b = p.vector("bias");
        if (b.size() != dim) key_error(p.key("bias"), "dimension differs from the target");
      } else {
        // A scalar magnitude spread evenly over the coordinates.
        const double size = p.number("magnitude");
        b = Vector::Constant(dim, size / std::sqrt(static_cast<double>(dim)));
      }
      out.perturbation = with_key(p.path(), [&] { return ScorePerturbation::additive_bias(b); });
    } else if (kind == "noise") {
      const double tau = p.number("tau");
      out.perturbation = with_key(p.key("tau"), [&] { return ScorePerturbation::gaussian_noise(tau); });
    } else {
      key_error(p.key("kind"), "expected none, bias or noise");
    }
    p.finish();
  }
  s.finish();
  with_key(s.path(), [&] {
    validate_sampler_config(c);
    return 0;
  });
  return out;
}

HeatmapSpec build_heatmap(Section& s) {
  HeatmapSpec h;
  if (!s.present()) return h;
  h.enabled = s.boolean("enabled", true);
  if (s.has("lambdas")) h.lambdas = s.numbers("lambdas");
  if (s.has("times")) h.times = s.numbers("times");
  if (h.lambdas.empty() && h.times.empty()) key_error(s.key("lambdas"), "give lambdas or times");
  if (!h.lambdas.empty() && !h.times.empty()) key_error(s.key("times"), "give either lambdas or times, not both");
  for (double l : h.lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) key_error(s.key("lambdas"), "values must lie in [0, 1]");
  }
  h.x_min = s.number("x_min", h.x_min);
  h.x_max = s.number("x_max", h.x_max);
  if (!(h.x_max > h.x_min)) key_error(s.key("x_max"), "must exceed x_min");
  h.x_points = s.count("x_points", h.x_points, 3);
  h.geometric = s.boolean("geometric", h.geometric);
  h.prominence = s.number("prominence", h.prominence);
  if (!(h.prominence >= 0.0 && h.prominence < 1.0)) key_error(s.key("prominence"), "must lie in [0, 1)");
  s.finish();
  return h;
}

DiagnosticsSpec build_diagnostics(Section& s) {
  DiagnosticsSpec d;
  if (!s.present()) return d;
  d.bounds = s.boolean("bounds", d.bounds);
  d.metrics = s.boolean("metrics", d.metrics);
  d.lipschitz_times = s.count("lipschitz_times", d.lipschitz_times);
  d.hessian_points = s.count("hessian_points", d.hessian_points, 1);
  d.action_grid = s.count("action_grid", d.action_grid, 100);
  d.action_samples = s.count("action_samples", d.action_samples, 10);
  d.profile_points = s.count("profile_points", d.profile_points, 2);
  d.reference_samples = s.count("reference_samples", d.reference_samples);
  if (s.has("kl_bandwidth")) {
    d.kl_bandwidth = s.number("kl_bandwidth");
    if (!(*d.kl_bandwidth > 0.0)) key_error(s.key("kl_bandwidth"), "must be positive");
  }
  Section h = s.sub("heatmap");
  d.heatmap = build_heatmap(h);
  s.finish();
  return d;
}

SweepSpec build_sweep(Section& s) {
  SweepSpec w;
  const std::string axis = s.string("axis");
  w.axis = with_key(s.key("axis"), [&] { return sweep_axis_from_name(axis); });
  w.values = s.numbers("values");
  if (!std::is_sorted(w.values.begin(), w.values.end())) key_error(s.key("values"), "must be sorted ascending");
  for (double v : w.values) {
    if (!std::isfinite(v) || v < 0.0) key_error(s.key("values"), "values must be finite and non-negative");
    if (w.axis == SweepAxis::kSteps && (v < 1.0 || v != std::floor(v))) key_error(s.key("values"), "step counts must be positive integers");
    if (w.axis == SweepAxis::kKappa && !(v > 0.0 && v < 1.0)) key_error(s.key("values"), "kappa values must lie in (0, 1)");
  }
  w.seeds = s.count("seeds", w.seeds, 1);
  s.finish();
  return w;
}

}  // namespace

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSteps: return "M";
    case SweepAxis::kEpsScore: return "eps_score";
    case SweepAxis::kKappa: return "kappa";
  }
  return "M";
}

SweepAxis sweep_axis_from_name(const std::string& name) {
  if (name == "M" || name == "steps") return SweepAxis::kSteps;
  if (name == "eps_score") return SweepAxis::kEpsScore;
  if (name == "kappa") return SweepAxis::kKappa;
  fail(ErrorCode::kConfig, "unknown sweep axis '" + name + "' (expected M, eps_score or kappa)");
}

BaseDistribution ExperimentConfig::base_distribution() const {
  if (!target) fail(ErrorCode::kConfig, "config key 'target': missing required table");
  return base.kind == BaseKind::kGaussian ? BaseDistribution::gaussian(target->dim(), base.sigma)
                                          : BaseDistribution::student_t(target->dim(), base.sigma, base.alpha);
}

Schedule ExperimentConfig::make_schedule() const {
  return Schedule::from_name(schedule.family, schedule.phi, schedule.horizon);
}

DiffusionPath ExperimentConfig::make_path() const { return DiffusionPath(base_distribution(), target, make_schedule()); }

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source) {
  const toml::table root_table = parse_toml(text, source);
  Section root(&root_table, "");
  ExperimentConfig cfg;

  Section exp = root.sub("experiment");
  if (exp.present()) {
    cfg.name = exp.string("name", cfg.name);
    const std::int64_t seed = exp.integer("seed", 0);
    if (seed < 0) key_error(exp.key("seed"), "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.threads = static_cast<int>(exp.count("threads", 1, 1));
    cfg.out_dir = exp.string("out", cfg.out_dir);
    exp.finish();
  }

  Section target = root.sub("target");
  cfg.target = build_target(target);
  cfg.target_kind = cfg.target->kind();

  Section base = root.sub("base");
  cfg.base = build_base(base);
  Section schedule = root.sub("schedule");
  cfg.schedule = build_schedule(schedule);
  Section sampler = root.sub("sampler");
  cfg.sampler = build_sampler(sampler, cfg.target->dim());
  cfg.sampler.config.seed = cfg.seed;
  cfg.sampler.config.threads = cfg.threads;
  Section diagnostics = root.sub("diagnostics");
  cfg.diagnostics = build_diagnostics(diagnostics);
  Section sweep = root.sub("sweep");
  if (sweep.present()) cfg.sweep = build_sweep(sweep);
  Section theory = root.sub("theory");
  if (theory.present()) {
    cfg.theory.eps = theory.number("eps", cfg.theory.eps);
    if (!(cfg.theory.eps > 0.0)) key_error(theory.key("eps"), "must be positive");
    theory.finish();
  }
  root.finish();

  // The base must be constructible in the target's dimension.
  with_key("base", [&] { return cfg.base_distribution(); });
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path, const RunOverrides& overrides) {
  ExperimentConfig cfg = parse_experiment_config(read_file(path), path);
  if (overrides.seed) {
    cfg.seed = *overrides.seed;
    cfg.sampler.config.seed = cfg.seed;
  }
  if (overrides.threads) {
    if (*overrides.threads < 1) fail(ErrorCode::kInvalidArgument, "--threads must be at least 1");
    cfg.threads = *overrides.threads;
    cfg.sampler.config.threads = cfg.threads;
  }
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  return cfg;
}

TargetPtr parse_target_config(const std::string& text, const std::string& source) {
  const toml::table root_table = parse_toml(text, source);
  Section root(&root_table, "");
  Section target = root.sub("target");
  TargetPtr t = build_target(target);
  return t;
}

TargetPtr load_target_config(const std::string& path) { return parse_target_config(read_file(path), path); }

}  // namespace dalmc
