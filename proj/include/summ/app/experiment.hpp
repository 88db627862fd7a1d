#pragma once

// Turns a validated RunConfig into seeded runs. Data files are loaded once
// and shared read-only between runs.

#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "summ/diagnostics.hpp"
#include "summ/driver.hpp"
#include "summ/io/config.hpp"
#include "summ/io/idx.hpp"
#include "summ/mlp.hpp"

namespace summ::app {

class DataMissingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunArtifacts {
  std::string run_id;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  RunResult result;
  std::optional<double> test_accuracy;  ///< MLP runs only, at the reported iterate
  std::size_t region_exits = 0;
};

inline std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

inline std::string make_run_id(double lambda, std::uint64_t seed) {
  return "lam" + format_number(lambda) + "_seed" + std::to_string(seed);
}

inline void require_file(const std::string& path, const char* key) {
  if (path.empty()) throw DataMissingError(std::string("config key '") + key + "' is not set");
  if (!std::filesystem::exists(path)) {
    throw DataMissingError(std::string("data file '") + path + "' (config key '" + key + "') does not exist");
  }
}

class Experiment {
public:
  explicit Experiment(RunConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.is_neural()) {
      require_file(cfg_.train_images, "data.train_images");
      require_file(cfg_.train_labels, "data.train_labels");
      require_file(cfg_.test_images, "data.test_images");
      require_file(cfg_.test_labels, "data.test_labels");
      train_ = std::make_shared<const Dataset>(load_mnist(cfg_.train_images, cfg_.train_labels));
      test_ = std::make_shared<const Dataset>(load_mnist(cfg_.test_images, cfg_.test_labels));
      std::vector<Index> dims{train_->features()};
      dims.insert(dims.end(), cfg_.hidden.begin(), cfg_.hidden.end());
      dims.push_back(10);
      model_.emplace(std::move(dims));
    } else {
      problem_.emplace(make_problem(parse_problem_kind(cfg_.problem_kind), cfg_.dim, cfg_.condition,
                                    cfg_.noise_radius, cfg_.problem_seed));
    }
    T_ = cfg_.horizon(train_ ? train_->size() : 0);
    schedule_ = cfg_.schedule(T_);
  }

  const RunConfig& config() const { return cfg_; }
  std::int64_t horizon() const { return T_; }
  const ScheduleSpec& schedule() const { return schedule_; }
  const std::optional<StochasticProblem>& problem() const { return problem_; }

  std::string evaluation_note() const {
    if (!cfg_.is_neural()) return "grad_norm and full loss are exact at every step";
    return "grad_norm evaluated once per epoch on a fixed " + std::to_string(std::min<Index>(2048, train_->size())) +
           "-sample training subset; full loss on the whole training set at the same checkpoints; "
           "per-step train_loss is the mini-batch loss";
  }

  RunArtifacts run(double lambda, std::uint64_t seed) const {
    const MomentumConfig mc = cfg_.momentum(lambda);
    const OutputMode mode = parse_output_mode(cfg_.output_mode, seed ^ 0x9e3779b97f4a7c15ULL);
    RunOptions opts;
    opts.note = evaluation_note();

    RunArtifacts art;
    art.run_id = make_run_id(lambda, seed);
    art.lambda = lambda;
    art.seed = seed;
    if (cfg_.is_neural()) {
      MlpOracle oracle(*model_, train_, cfg_.batch, cfg_.sampling);
      opts.checkpoint_every = cfg_.checkpoint_every.value_or(oracle.batches_per_epoch());
      art.result = run_experiment(oracle, mc, schedule_, T_, mode, seed, cfg_.formulation, opts);
      art.test_accuracy = accuracy(*model_, art.result.output_x, *test_);
    } else {
      StochasticProblem oracle = *problem_;
      opts.checkpoint_every = cfg_.checkpoint_every.value_or(1);
      art.result = run_experiment(oracle, mc, schedule_, T_, mode, seed, cfg_.formulation, opts);
    }
    for (const auto& s : art.result.trajectory.steps) art.region_exits += s.outside_region ? 1 : 0;
    return art;
  }

private:
  RunConfig cfg_;
  std::shared_ptr<const Dataset> train_;
  std::shared_ptr<const Dataset> test_;
  std::optional<MlpModel> model_;
  std::optional<StochasticProblem> problem_;
  std::int64_t T_ = 0;
  ScheduleSpec schedule_;
};

}  // namespace summ::app
