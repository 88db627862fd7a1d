#pragma once

// Run configuration: a flat YAML mapping whose keys are dotted paths, e.g.
//
//   problem.kind: noisy_quadratic
//   optimizer.lambda: [0, 0.5, 1, 5, 10]
//
// Nested mappings and unknown keys are rejected. Command-line overrides use
// the same keys ("optimizer.mu=0.5") and pass through the same validation.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "summ/io/dataset.hpp"
#include "summ/momentum.hpp"
#include "summ/problems.hpp"
#include "summ/schedule.hpp"
#include "summ/trajectory.hpp"

namespace summ {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "problem.kind",       "problem.dim",        "problem.condition",    "problem.noise_radius",
      "problem.seed",       "problem.hidden",     "optimizer.mu",         "optimizer.lambda",
      "optimizer.formulation", "schedule.alpha",  "schedule.K",           "schedule.K_frac",
      "schedule.p",         "run.epochs",         "run.batch",            "run.iterations",
      "run.seeds",          "run.output_mode",    "run.sampling",         "run.checkpoint_every",
      "data.train_images",  "data.train_labels",  "data.test_images",     "data.test_labels",
      "output.path",
  };
  return keys;
}

inline constexpr const char* kMlpProblem = "mlp_mnist";

struct RunConfig {
  std::string problem_kind = "noisy_quadratic";
  Index dim = 20;
  double condition = 100.0;
  double noise_radius = 1.0;
  std::uint64_t problem_seed = 0;
  std::vector<Index> hidden{128};

  double mu = 0.9;
  std::vector<double> lambdas{0.0};
  Formulation formulation = Formulation::unified;

  double alpha = 0.01;
  std::optional<std::int64_t> K;  ///< absolute constant-phase length
  double K_frac = 0.9;            ///< used when K is not given
  double p = 1.0;

  std::int64_t epochs = 1;
  std::int64_t batch = 128;
  std::optional<std::int64_t> iterations;
  std::vector<std::uint64_t> seeds{0};
  std::string output_mode = "last";
  Sampling sampling = Sampling::with_replacement;
  std::optional<std::int64_t> checkpoint_every;

  std::string train_images, train_labels, test_images, test_labels;
  std::string output_path;

  bool is_neural() const { return problem_kind == kMlpProblem; }

  /// Number of steps: run.iterations for synthetic problems,
  /// ceil(n_train / batch) * epochs for the MLP.
  std::int64_t horizon(std::int64_t n_train = 0) const {
    if (is_neural()) return iterations_for(n_train, batch, epochs);
    return *iterations;
  }

  ScheduleSpec schedule(std::int64_t T) const {
    return make_schedule(alpha, K ? *K : k_from_fraction(K_frac, T), p);
  }

  MomentumConfig momentum(double lambda) const { return make_config(mu, lambda); }
};

namespace detail {

struct RawEntry {
  YAML::Node value;
  int line = 0;  ///< 1-based, 0 for command-line overrides
};

inline std::string where(const std::string& origin, int line) {
  return line > 0 ? origin + ":" + std::to_string(line) : origin;
}

template <class T>
T scalar_as(const std::string& key, const RawEntry& e, const std::string& origin) {
  if (!e.value.IsScalar()) throw ConfigError(where(origin, e.line) + ": '" + key + "' must be a scalar");
  try {
    return e.value.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(origin, e.line) + ": '" + key + "' has an invalid value '" + e.value.Scalar() + "'");
  }
}

template <class T>
std::vector<T> list_as(const std::string& key, const RawEntry& e, const std::string& origin) {
  if (e.value.IsScalar()) return {scalar_as<T>(key, e, origin)};
  if (!e.value.IsSequence()) throw ConfigError(where(origin, e.line) + ": '" + key + "' must be a scalar or list");
  std::vector<T> out;
  for (const auto& item : e.value) out.push_back(scalar_as<T>(key, RawEntry{item, e.line}, origin));
  if (out.empty()) throw ConfigError(where(origin, e.line) + ": '" + key + "' must not be empty");
  return out;
}

inline RunConfig build_config(const std::map<std::string, RawEntry>& raw, const std::string& origin) {
  RunConfig c;
  auto get = [&](const char* key) -> const RawEntry* {
    auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto str = [&](const char* key, std::string& out) {
    if (auto* e = get(key)) out = scalar_as<std::string>(key, *e, origin);
  };
  auto positive_int = [&](const char* key, std::int64_t& out) {
    if (auto* e = get(key)) {
      out = scalar_as<std::int64_t>(key, *e, origin);
      if (out < 1) throw ConfigError(where(origin, e->line) + ": '" + std::string(key) + "' must be >= 1");
    }
  };
  // Domain errors keep their type but gain the key and location.
  auto domain = [&](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const DomainError& err) {
      const auto* e = get(key);
      throw DomainError(where(origin, e ? e->line : 0) + ": " + key + ": " + err.what());
    }
  };

  str("problem.kind", c.problem_kind);
  if (c.problem_kind != kMlpProblem) {
    try {
      (void)parse_problem_kind(c.problem_kind);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(where(origin, get("problem.kind")->line) + ": " + err.what() +
                        " (expected noisy_quadratic, noisy_rosenbrock, logistic_synthetic or mlp_mnist)");
    }
  }
  if (auto* e = get("problem.dim")) {
    c.dim = scalar_as<Index>("problem.dim", *e, origin);
    if (c.dim < 1) throw ConfigError(where(origin, e->line) + ": 'problem.dim' must be >= 1");
  }
  if (auto* e = get("problem.condition")) c.condition = scalar_as<double>("problem.condition", *e, origin);
  if (auto* e = get("problem.noise_radius")) c.noise_radius = scalar_as<double>("problem.noise_radius", *e, origin);
  if (auto* e = get("problem.seed")) c.problem_seed = scalar_as<std::uint64_t>("problem.seed", *e, origin);
  if (auto* e = get("problem.hidden")) c.hidden = list_as<Index>("problem.hidden", *e, origin);
  if (!(c.condition >= 1.0)) throw DomainError(origin + ": problem.condition must be >= 1");
  if (!(c.noise_radius >= 0.0)) throw DomainError(origin + ": problem.noise_radius must be >= 0");

  if (auto* e = get("optimizer.mu")) c.mu = scalar_as<double>("optimizer.mu", *e, origin);
  if (auto* e = get("optimizer.lambda")) c.lambdas = list_as<double>("optimizer.lambda", *e, origin);
  if (auto* e = get("optimizer.formulation")) {
    try {
      c.formulation = parse_formulation(scalar_as<std::string>("optimizer.formulation", *e, origin));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(where(origin, e->line) + ": " + err.what());
    }
  }
  domain("optimizer.lambda", [&] {
    for (double l : c.lambdas) (void)make_config(c.mu, l);
  });

  if (auto* e = get("schedule.alpha")) c.alpha = scalar_as<double>("schedule.alpha", *e, origin);
  if (auto* e = get("schedule.p")) c.p = scalar_as<double>("schedule.p", *e, origin);
  if (get("schedule.K") && get("schedule.K_frac")) {
    throw ConfigError(where(origin, get("schedule.K_frac")->line) +
                      ": give either schedule.K or schedule.K_frac, not both");
  }
  if (auto* e = get("schedule.K")) c.K = scalar_as<std::int64_t>("schedule.K", *e, origin);
  if (auto* e = get("schedule.K_frac")) c.K_frac = scalar_as<double>("schedule.K_frac", *e, origin);
  domain("schedule.alpha", [&] { (void)make_schedule(c.alpha, c.K.value_or(0), c.p); });
  domain("schedule.K_frac", [&] { (void)k_from_fraction(c.K_frac, 1); });

  positive_int("run.epochs", c.epochs);
  positive_int("run.batch", c.batch);
  if (auto* e = get("run.iterations")) {
    std::int64_t it = 0;
    positive_int("run.iterations", it);
    c.iterations = it;
    (void)e;
  }
  if (auto* e = get("run.checkpoint_every")) {
    std::int64_t every = 0;
    positive_int("run.checkpoint_every", every);
    c.checkpoint_every = every;
    (void)e;
  }
  if (auto* e = get("run.seeds")) {
    if (e->value.IsScalar()) {
      const auto n = scalar_as<std::int64_t>("run.seeds", *e, origin);
      if (n < 1) throw ConfigError(where(origin, e->line) + ": 'run.seeds' count must be >= 1");
      c.seeds.clear();
      for (std::int64_t s = 0; s < n; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
    } else {
      c.seeds = list_as<std::uint64_t>("run.seeds", *e, origin);
    }
  }
  str("run.output_mode", c.output_mode);
  if (c.output_mode != "last" && c.output_mode != "random" && c.output_mode != "minimum") {
    throw ConfigError(where(origin, get("run.output_mode")->line) + ": run.output_mode must be last, random or minimum");
  }
  if (auto* e = get("run.sampling")) {
    try {
      c.sampling = parse_sampling(scalar_as<std::string>("run.sampling", *e, origin));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(where(origin, e->line) + ": " + err.what());
    }
  }

  str("data.train_images", c.train_images);
  str("data.train_labels", c.train_labels);
  str("data.test_images", c.test_images);
  str("data.test_labels", c.test_labels);
  str("output.path", c.output_path);

  if (c.is_neural()) {
    for (const char* key : {"data.train_images", "data.train_labels", "data.test_images", "data.test_labels"}) {
      if (!get(key)) throw ConfigError(origin + ": problem.kind mlp_mnist requires '" + std::string(key) + "'");
    }
  } else if (!c.iterations) {
    throw ConfigError(origin + ": synthetic problems require 'run.iterations'");
  }
  return c;
}

inline std::pair<std::string, std::string> split_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' must look like key=value");
  return {kv.substr(0, eq), kv.substr(eq + 1)};
}

}  // namespace detail

/// Parses configuration text. `origin` names the source in error messages.
inline RunConfig parse_config(const std::string& text, const std::string& origin,
                              const std::vector<std::string>& overrides = {}) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& err) {
    throw ConfigError(origin + ":" + std::to_string(err.mark.line + 1) + ": parse error: " + err.msg);
  }
  if (root.IsNull()) throw ConfigError(origin + ":1: parse error: configuration is empty");
  if (!root.IsMap()) {
    throw ConfigError(origin + ":" + std::to_string(root.Mark().line + 1) +
                      ": parse error: configuration must be a mapping of dotted keys");
  }
  std::map<std::string, detail::RawEntry> raw;
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const int line = kv.first.Mark().line + 1;
    if (!config_keys().contains(key)) {
      throw ConfigError(detail::where(origin, line) + ": unknown key '" + key + "'");
    }
    if (kv.second.IsMap()) {
      throw ConfigError(detail::where(origin, line) + ": '" + key + "' must not be a nested mapping");
    }
    if (raw.contains(key)) throw ConfigError(detail::where(origin, line) + ": duplicate key '" + key + "'");
    raw[key] = detail::RawEntry{kv.second, line};
  }
  for (const auto& ov : overrides) {
    auto [key, value] = detail::split_override(ov);
    if (!config_keys().contains(key)) throw ConfigError("override: unknown key '" + key + "'");
    YAML::Node node;
    try {
      node = YAML::Load(value);
    } catch (const YAML::ParserException& err) {
      throw ConfigError("override '" + ov + "': parse error: " + err.msg);
    }
    if (key == "schedule.K") raw.erase("schedule.K_frac");
    if (key == "schedule.K_frac") raw.erase("schedule.K");
    raw[key] = detail::RawEntry{node, 0};
  }
  return detail::build_config(raw, origin);
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path, overrides);
}

}  // namespace summ
