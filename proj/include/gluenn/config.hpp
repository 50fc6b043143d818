#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gluenn/io.hpp"
#include "gluenn/loss.hpp"
#include "gluenn/trainer.hpp"

namespace gluenn {

struct EvalGridSpec {
  int count = 400;
  Spacing spacing = Spacing::logarithmic;
};

// Declarative experiment description; bundled config files reproduce the
// published sampling tables verbatim. Unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::chemical;
  ChemicalParams chem;
  InflationParams infl;
  TunnelingParams tun;
  ArchSpec arch;
  std::map<std::string, SampleSpec> samples;
  LossWeights weights;
  TrainConfig train;
  double oracle_rel_tol = 1e-10;
  double oracle_abs_tol = 1e-12;
  EvalGridSpec eval_grid;
  std::string output_dir;  // optional; CLI --out or GLUENN_OUT_ROOT otherwise

  std::pair<double, double> domain() const {
    switch (kind) {
      case ExperimentKind::chemical: return {chem.x_min, chem.x_max};
      case ExperimentKind::inflation: return {infl.a_min, infl.a_max};
      default: return {tun.x_min, tun.x_max};
    }
  }
};

// ---------------------------------------------------------------------------
// Bundled defaults (the published sampling tables plus our training setup)
// ---------------------------------------------------------------------------

inline ExperimentConfig default_experiment_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.train.optimizer = OptimizerKind::adam;
  cfg.train.beta1 = 0.9;
  cfg.train.beta2 = 0.999;
  cfg.train.adam_eps = 1e-8;
  cfg.train.seed = 0;
  cfg.train.log_every = 100;
  switch (kind) {
    case ExperimentKind::chemical: {
      cfg.arch.input_transform = InputTransform::log_scaled;
      cfg.arch.x_ref = 1.0;
      cfg.arch.head_hidden = {100, 100};
      cfg.arch.head_output = 100;
      cfg.arch.trunks = {{{100}, "c1_1"}, {{100}, "c2_1"}};
      cfg.samples["alpha"] = {{{1.0, 1.9}}, 28, Spacing::logarithmic};
      cfg.samples["beta"] = {{{7.8, 31.0}}, 60, Spacing::logarithmic};
      cfg.weights = {1600.0, 700.0, 0.0, 0.0};
      cfg.train.max_steps = 30000;
      cfg.train.learning_rate = 2e-3;
      cfg.train.lr_decay = 0.9999;
      cfg.train.convergence_window = 4000;
      cfg.train.convergence_rel_improvement = 1e-4;
      cfg.oracle_abs_tol = 1e-14;
      cfg.eval_grid = {301, Spacing::logarithmic};
      break;
    }
    case ExperimentKind::inflation: {
      cfg.arch.input_transform = InputTransform::log_scaled;
      cfg.arch.x_ref = 0.1;
      cfg.arch.head_hidden = {1, 4, 4, 4, 50};
      cfg.arch.head_output = 50;
      cfg.arch.trunks = {{{50}, "c1_1"}, {{50}, "c2_1"}, {{50}, "c2_2"}};
      cfg.samples["alpha"] = {{{0.1, 1.0}}, 10, Spacing::linear};
      cfg.samples["beta"] = {{{1.0, 124.0}}, 650, Spacing::logarithmic};
      cfg.samples["gamma"] = {{{23.0, 500.0}}, 382, Spacing::logarithmic};
      cfg.weights = {800.0, 0.50, 0.0032, 0.0};
      cfg.train.max_steps = 40000;
      cfg.train.learning_rate = 2e-3;
      cfg.train.lr_decay = 0.9999;
      cfg.train.convergence_window = 5000;
      cfg.train.convergence_rel_improvement = 1e-4;
      cfg.eval_grid = {400, Spacing::logarithmic};
      break;
    }
    default: {
      cfg.arch.input_transform = InputTransform::scaled;
      cfg.arch.x_ref = 13.14;
      cfg.arch.head_hidden = {100, 100, 100};
      cfg.arch.head_output = 100;
      const bool real = kind == ExperimentKind::tunneling_real;
      cfg.arch.trunks = {{{100}, real ? "c1_1" : "c3_1"},
                         {{100}, real ? "c1_2" : "c3_2"},
                         {{100}, real ? "c2_1" : "c4_1"},
                         {{100}, real ? "c2_2" : "c4_2"}};
      cfg.samples["alpha"] = {{{6.05, 13.14}}, 140, Spacing::linear};
      cfg.samples["beta"] = {{{-13.14, 11.62}}, 490, Spacing::linear};
      if (real) {
        cfg.samples["gamma"] = {{{-4.08, 4.03}}, 160, Spacing::linear};
        cfg.samples["delta"] = {{{-13.14, -5.09}, {4.03, 13.14}}, 340, Spacing::linear};
      } else {
        cfg.samples["gamma"] = {{{-3.06, 5.04}}, 160, Spacing::linear};
        cfg.samples["delta"] = {{{-13.14, -5.09}, {5.04, 13.14}}, 320, Spacing::linear};
      }
      cfg.weights = {1.0, 3.0, 0.25, 0.25};
      cfg.train.max_steps = 12000;
      cfg.train.learning_rate = 2e-3;
      cfg.train.lr_decay = 0.9998;
      cfg.train.convergence_window = 3000;
      cfg.train.convergence_rel_improvement = 1e-4;
      cfg.eval_grid = {527, Spacing::linear};
      break;
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON round trip with strict validation
// ---------------------------------------------------------------------------

namespace detail_cfg {

inline void require_keys(const ordered_json& j, const std::set<std::string>& allowed,
                         const std::set<std::string>& required, const std::string& path) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(path + "." + key, "unknown key");
  for (const auto& key : required)
    if (!j.contains(key)) throw ConfigError(path + "." + key, "missing required key");
}

inline double positive(const ordered_json& j, const std::string& path) {
  const double v = j.get<double>();
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

inline double nonnegative(const ordered_json& j, const std::string& path) {
  const double v = j.get<double>();
  if (!(v >= 0.0)) throw ConfigError(path, "must be nonnegative");
  return v;
}

inline Spacing spacing_from(const ordered_json& j, const std::string& path) {
  const std::string s = j.get<std::string>();
  if (s == "linear") return Spacing::linear;
  if (s == "logarithmic") return Spacing::logarithmic;
  throw ConfigError(path, "spacing must be 'linear' or 'logarithmic'");
}

inline std::string spacing_name(Spacing s) {
  return s == Spacing::linear ? "linear" : "logarithmic";
}

}  // namespace detail_cfg

inline ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = experiment_name(cfg.kind);
  ordered_json phys;
  switch (cfg.kind) {
    case ExperimentKind::chemical:
      phys["eta"] = cfg.chem.eta;
      phys["x_min"] = cfg.chem.x_min;
      phys["x_max"] = cfg.chem.x_max;
      break;
    case ExperimentKind::inflation:
      phys["hubble"] = cfg.infl.hubble;
      phys["k"] = cfg.infl.k;
      phys["mass"] = cfg.infl.mass;
      phys["a_star"] = cfg.infl.a_star;
      phys["a_min"] = cfg.infl.a_min;
      phys["a_max"] = cfg.infl.a_max;
      break;
    default:
      phys["sigma"] = cfg.tun.sigma;
      phys["d"] = cfg.tun.d;
      phys["v0"] = cfg.tun.v0;
      phys["k"] = cfg.tun.k;
      phys["mass"] = cfg.tun.mass;
      phys["hbar"] = cfg.tun.hbar;
      phys["epsilon_reg"] = cfg.tun.epsilon_reg;
      phys["x_min"] = cfg.tun.x_min;
      phys["x_max"] = cfg.tun.x_max;
      break;
  }
  j["physics"] = phys;
  j["arch"] = arch_to_json(cfg.arch);
  ordered_json samples;
  for (const auto& [label, spec] : cfg.samples) {
    ordered_json s;
    ordered_json intervals = ordered_json::array();
    for (const auto& [lo, hi] : spec.intervals) intervals.push_back({lo, hi});
    s["intervals"] = intervals;
    s["count"] = spec.count;
    s["spacing"] = detail_cfg::spacing_name(spec.spacing);
    samples[label] = s;
  }
  j["samples"] = samples;
  ordered_json w;
  w["lambda_a"] = cfg.weights.lambda_a;
  w["lambda_b"] = cfg.weights.lambda_b;
  if (cfg.kind != ExperimentKind::chemical) w["lambda_c"] = cfg.weights.lambda_c;
  if (is_tunneling(cfg.kind)) w["lambda_d"] = cfg.weights.lambda_d;
  j["weights"] = w;
  ordered_json t;
  t["max_steps"] = cfg.train.max_steps;
  t["learning_rate"] = cfg.train.learning_rate;
  t["lr_decay"] = cfg.train.lr_decay;
  t["optimizer"] = cfg.train.optimizer == OptimizerKind::adam ? "adam" : "sgd";
  t["beta1"] = cfg.train.beta1;
  t["beta2"] = cfg.train.beta2;
  t["adam_eps"] = cfg.train.adam_eps;
  t["seed"] = cfg.train.seed;
  t["log_every"] = cfg.train.log_every;
  t["convergence_window"] = cfg.train.convergence_window;
  t["convergence_rel_improvement"] = cfg.train.convergence_rel_improvement;
  j["train"] = t;
  ordered_json o;
  o["rel_tol"] = cfg.oracle_rel_tol;
  o["abs_tol"] = cfg.oracle_abs_tol;
  j["oracle"] = o;
  ordered_json g;
  g["count"] = cfg.eval_grid.count;
  g["spacing"] = detail_cfg::spacing_name(cfg.eval_grid.spacing);
  j["eval_grid"] = g;
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
  return j;
}

inline ExperimentConfig config_from_json(const ordered_json& j) {
  using namespace detail_cfg;
  require_keys(j,
               {"experiment", "physics", "arch", "samples", "weights", "train", "oracle",
                "eval_grid", "output_dir"},
               {"experiment", "physics", "arch", "samples", "weights", "train", "oracle",
                "eval_grid"},
               "config");
  ExperimentConfig cfg;
  const std::string name = j.at("experiment").get<std::string>();
  if (name == "chemical") cfg.kind = ExperimentKind::chemical;
  else if (name == "inflation") cfg.kind = ExperimentKind::inflation;
  else if (name == "tunneling_real") cfg.kind = ExperimentKind::tunneling_real;
  else if (name == "tunneling_imag") cfg.kind = ExperimentKind::tunneling_imag;
  else throw ConfigError("config.experiment", "unknown experiment '" + name + "'");

  const auto& phys = j.at("physics");
  switch (cfg.kind) {
    case ExperimentKind::chemical:
      require_keys(phys, {"eta", "x_min", "x_max"}, {"eta"}, "config.physics");
      cfg.chem.eta = positive(phys.at("eta"), "config.physics.eta");
      if (phys.contains("x_min")) cfg.chem.x_min = positive(phys.at("x_min"), "config.physics.x_min");
      if (phys.contains("x_max")) cfg.chem.x_max = positive(phys.at("x_max"), "config.physics.x_max");
      break;
    case ExperimentKind::inflation:
      require_keys(phys, {"hubble", "k", "mass", "a_star", "a_min", "a_max"},
                   {"hubble", "k", "mass", "a_star"}, "config.physics");
      cfg.infl.hubble = positive(phys.at("hubble"), "config.physics.hubble");
      cfg.infl.k = positive(phys.at("k"), "config.physics.k");
      cfg.infl.mass = positive(phys.at("mass"), "config.physics.mass");
      cfg.infl.a_star = positive(phys.at("a_star"), "config.physics.a_star");
      if (phys.contains("a_min")) cfg.infl.a_min = positive(phys.at("a_min"), "config.physics.a_min");
      if (phys.contains("a_max")) cfg.infl.a_max = positive(phys.at("a_max"), "config.physics.a_max");
      break;
    default:
      require_keys(phys, {"sigma", "d", "v0", "k", "mass", "hbar", "epsilon_reg", "x_min", "x_max"},
                   {"sigma", "d", "v0", "k", "mass"}, "config.physics");
      cfg.tun.sigma = positive(phys.at("sigma"), "config.physics.sigma");
      cfg.tun.d = positive(phys.at("d"), "config.physics.d");
      cfg.tun.v0 = positive(phys.at("v0"), "config.physics.v0");
      cfg.tun.k = positive(phys.at("k"), "config.physics.k");
      cfg.tun.mass = positive(phys.at("mass"), "config.physics.mass");
      if (phys.contains("hbar")) cfg.tun.hbar = positive(phys.at("hbar"), "config.physics.hbar");
      if (phys.contains("epsilon_reg"))
        cfg.tun.epsilon_reg = positive(phys.at("epsilon_reg"), "config.physics.epsilon_reg");
      if (phys.contains("x_min")) cfg.tun.x_min = phys.at("x_min").get<double>();
      if (phys.contains("x_max")) cfg.tun.x_max = phys.at("x_max").get<double>();
      if (!(cfg.tun.energy() < cfg.tun.v0))
        throw ConfigError("config.physics.v0", "requires E = (hbar k)^2 / 2m < v0");
      break;
  }

  const auto& ja = j.at("arch");
  require_keys(ja, {"input_transform", "x_ref", "head_hidden", "head_output", "trunks", "activation"},
               {"input_transform", "x_ref", "head_hidden", "head_output", "trunks"}, "config.arch");
  if (ja.contains("activation") && ja.at("activation").get<std::string>() != "tanh")
    throw ConfigError("config.arch.activation", "only 'tanh' is supported");
  cfg.arch = arch_from_json(ja, "config.arch");
  try {
    validate_arch(cfg.arch);
  } catch (const Error& e) {
    throw ConfigError("config.arch", e.what());
  }

  for (const auto& [label, js] : j.at("samples").items()) {
    if (label != "alpha" && label != "beta" && label != "gamma" && label != "delta")
      throw ConfigError("config.samples." + label, "unknown sample set label");
    require_keys(js, {"intervals", "count", "spacing"}, {"intervals", "count", "spacing"},
                 "config.samples." + label);
    SampleSpec spec;
    for (const auto& ji : js.at("intervals")) {
      if (!ji.is_array() || ji.size() != 2)
        throw ConfigError("config.samples." + label + ".intervals", "each interval is [lo, hi]");
      spec.intervals.emplace_back(ji[0].get<double>(), ji[1].get<double>());
    }
    spec.count = js.at("count").get<int>();
    if (spec.count < 2) throw ConfigError("config.samples." + label + ".count", "must be at least 2");
    spec.spacing = spacing_from(js.at("spacing"), "config.samples." + label + ".spacing");
    cfg.samples[label] = spec;
  }

  const auto& jw = j.at("weights");
  require_keys(jw, {"lambda_a", "lambda_b", "lambda_c", "lambda_d"}, {"lambda_a", "lambda_b"},
               "config.weights");
  cfg.weights.lambda_a = nonnegative(jw.at("lambda_a"), "config.weights.lambda_a");
  cfg.weights.lambda_b = nonnegative(jw.at("lambda_b"), "config.weights.lambda_b");
  if (jw.contains("lambda_c"))
    cfg.weights.lambda_c = nonnegative(jw.at("lambda_c"), "config.weights.lambda_c");
  if (jw.contains("lambda_d"))
    cfg.weights.lambda_d = nonnegative(jw.at("lambda_d"), "config.weights.lambda_d");

  const auto& jt = j.at("train");
  require_keys(jt,
               {"max_steps", "learning_rate", "lr_decay", "optimizer", "beta1", "beta2", "adam_eps",
                "seed", "log_every", "convergence_window", "convergence_rel_improvement"},
               {"max_steps", "learning_rate", "seed"}, "config.train");
  cfg.train.max_steps = jt.at("max_steps").get<int>();
  cfg.train.learning_rate = positive(jt.at("learning_rate"), "config.train.learning_rate");
  if (jt.contains("lr_decay")) {
    cfg.train.lr_decay = jt.at("lr_decay").get<double>();
    if (!(cfg.train.lr_decay > 0.0 && cfg.train.lr_decay <= 1.0))
      throw ConfigError("config.train.lr_decay", "must be in (0, 1]");
  }
  if (jt.contains("optimizer")) {
    const std::string o = jt.at("optimizer").get<std::string>();
    if (o == "adam") cfg.train.optimizer = OptimizerKind::adam;
    else if (o == "sgd") cfg.train.optimizer = OptimizerKind::sgd;
    else throw ConfigError("config.train.optimizer", "must be 'adam' or 'sgd'");
  }
  if (jt.contains("beta1")) cfg.train.beta1 = jt.at("beta1").get<double>();
  if (jt.contains("beta2")) cfg.train.beta2 = jt.at("beta2").get<double>();
  if (jt.contains("adam_eps")) cfg.train.adam_eps = positive(jt.at("adam_eps"), "config.train.adam_eps");
  cfg.train.seed = jt.at("seed").get<std::uint64_t>();
  if (jt.contains("log_every")) cfg.train.log_every = jt.at("log_every").get<int>();
  if (jt.contains("convergence_window"))
    cfg.train.convergence_window = jt.at("convergence_window").get<int>();
  if (jt.contains("convergence_rel_improvement"))
    cfg.train.convergence_rel_improvement = jt.at("convergence_rel_improvement").get<double>();

  const auto& jo = j.at("oracle");
  require_keys(jo, {"rel_tol", "abs_tol"}, {"rel_tol", "abs_tol"}, "config.oracle");
  cfg.oracle_rel_tol = positive(jo.at("rel_tol"), "config.oracle.rel_tol");
  cfg.oracle_abs_tol = positive(jo.at("abs_tol"), "config.oracle.abs_tol");

  const auto& jg = j.at("eval_grid");
  require_keys(jg, {"count", "spacing"}, {"count", "spacing"}, "config.eval_grid");
  cfg.eval_grid.count = jg.at("count").get<int>();
  if (cfg.eval_grid.count < 2) throw ConfigError("config.eval_grid.count", "must be at least 2");
  cfg.eval_grid.spacing = spacing_from(jg.at("spacing"), "config.eval_grid.spacing");

  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();

  // experiment-specific completeness
  ExperimentSetup probe;
  probe.kind = cfg.kind;
  for (const auto& label : probe.required_sets())
    if (!cfg.samples.count(label))
      throw ConfigError("config.samples." + label, "required for " + experiment_name(cfg.kind));
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot read " + file.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config", std::string("JSON parse failure: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace gluenn
