#pragma once

// Runs T steps of the unified momentum method against a gradient oracle and
// reports one iterate according to the output mode.

#include <chrono>
#include <concepts>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "summ/momentum.hpp"
#include "summ/problems.hpp"
#include "summ/schedule.hpp"
#include "summ/trajectory.hpp"

namespace summ {

/// Anything that hands out unbiased noisy gradients at a point. The sample
/// carries the loss that goes with it (mini-batch loss for data-driven
/// oracles, exact loss for synthetic ones).
template <class O>
concept GradientOracle = requires(O& o, const Vector& x, Rng& rng) {
  { o.dim() } -> std::convertible_to<Index>;
  { o.sample(x, rng) } -> std::same_as<GradientSample>;
};

/// Oracles that can also evaluate the full objective and its gradient.
template <class O>
concept FullEvaluator = requires(const O& o, const Vector& x) {
  { o.full_gradient(x) } -> std::convertible_to<Vector>;
  { o.loss(x) } -> std::convertible_to<double>;
};

template <class O>
concept RegionAware = requires(const O& o, const Vector& x) {
  { o.in_operating_region(x) } -> std::convertible_to<bool>;
};

struct RunOptions {
  /// Full evaluations happen at t = 1, every multiple of this, and t = T.
  std::int64_t checkpoint_every = 1;
  /// Keep x_1 .. x_{T+1} in the result (for replay comparisons).
  bool record_iterates = false;
  /// Skip full evaluations entirely, even when the oracle supports them.
  bool disable_full_evaluation = false;
  std::string note;
};

struct RunResult {
  Vector output_x;
  std::int64_t output_index = 0;
  TrajectoryRecord trajectory;
  std::vector<Vector> iterates;  ///< x_1 .. x_{T+1} when requested
  Vector final_x;                ///< x_{T+1}
};

/// Owns one of the three formulations behind a common interface.
class Stepper {
public:
  Stepper(Formulation f, Vector x1) {
    switch (f) {
      case Formulation::unified: state_ = init_state(std::move(x1)); break;
      case Formulation::two_step: state_ = init_two_step_state(std::move(x1)); break;
      case Formulation::three_step: state_ = init_three_step_state(std::move(x1)); break;
    }
  }

  const Vector& x() const {
    return std::visit([](const auto& s) -> const Vector& { return s.x; }, state_);
  }

  void advance(const MomentumConfig& cfg, double eta, const Vector& g) {
    std::visit([&](auto& s) { summ::advance(s, cfg, eta, g); }, state_);
  }

  /// Current momentum buffer m_t, when the formulation stores one.
  const Vector* momentum() const {
    if (const auto* s = std::get_if<MomentumState>(&state_)) return &s->m;
    if (const auto* s = std::get_if<TwoStepState>(&state_)) return &s->m_curr;
    return nullptr;
  }

private:
  std::variant<MomentumState, TwoStepState, ThreeStepState> state_;
};

template <GradientOracle Oracle>
RunResult run_experiment(Oracle& oracle, Vector x1, const MomentumConfig& cfg,
                         const ScheduleSpec& schedule, std::int64_t T, const OutputMode& mode,
                         std::uint64_t seed, Formulation formulation, const RunOptions& options = {}) {
  if (T < 1) throw DomainError("horizon T must be >= 1");
  if (options.checkpoint_every < 1) throw DomainError("checkpoint interval must be >= 1");
  detail::require_same_dim(oracle.dim(), x1.size(), "initial point");

  constexpr bool has_full = FullEvaluator<Oracle>;
  const bool evaluate = has_full && !options.disable_full_evaluation;
  if (std::holds_alternative<MinimumOutput>(mode) && !evaluate) {
    throw std::invalid_argument("minimum output mode requires a full-gradient evaluator");
  }

  RunResult result;
  auto& traj = result.trajectory;
  traj.seed = seed;
  traj.mu = cfg.mu();
  traj.lambda = cfg.lambda();
  traj.schedule = schedule;
  traj.formulation = formulation;
  traj.note = options.note;
  traj.steps.reserve(static_cast<std::size_t>(T));
  if (options.record_iterates) result.iterates.reserve(static_cast<std::size_t>(T + 1));

  std::optional<std::int64_t> random_pick;
  if (const auto* r = std::get_if<RandomOutput>(&mode)) random_pick = draw_random_index(r->seed, T);
  std::optional<double> best_norm;

  Stepper stepper(formulation, std::move(x1));
  Rng rng(seed);
  const auto start = std::chrono::steady_clock::now();

  for (std::int64_t t = 1; t <= T; ++t) {
    const Vector& x = stepper.x();
    if (!x.allFinite()) throw DivergenceError(t, "iterate has non-finite components");
    if (options.record_iterates) result.iterates.push_back(x);

    StepRecord rec;
    rec.t = t;
    rec.eta = step_size(schedule, t);
    if constexpr (RegionAware<Oracle>) rec.outside_region = !oracle.in_operating_region(x);

    const bool checkpoint = evaluate && (t == 1 || t == T || t % options.checkpoint_every == 0);
    Vector full_grad;
    if constexpr (has_full) {
      if (checkpoint) {
        full_grad = oracle.full_gradient(x);
        rec.full_loss = oracle.loss(x);
        rec.grad_norm = full_grad.norm();
        if (!std::isfinite(*rec.full_loss) || !std::isfinite(*rec.grad_norm)) {
          throw DivergenceError(t, "full loss or gradient is not finite");
        }
      }
    }

    if (t == T && std::holds_alternative<LastOutput>(mode)) result.output_x = x;
    if (random_pick && *random_pick == t) result.output_x = x;
    if (std::holds_alternative<MinimumOutput>(mode) && rec.grad_norm &&
        (!best_norm || *rec.grad_norm < *best_norm)) {
      best_norm = rec.grad_norm;
      result.output_index = t;
      result.output_x = x;
    }

    GradientSample sample = oracle.sample(x, rng);
    if (!std::isfinite(sample.loss)) throw DivergenceError(t, "loss is not finite");
    if (!sample.grad.allFinite()) throw DivergenceError(t, "sampled gradient is not finite");
    rec.loss = sample.loss;

    stepper.advance(cfg, rec.eta, sample.grad);
    if (checkpoint) {
      if (const Vector* m = stepper.momentum()) rec.grad_dot_momentum = full_grad.dot(*m);
    }
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    traj.steps.push_back(std::move(rec));
  }

  result.final_x = stepper.x();
  if (!result.final_x.allFinite()) throw DivergenceError(T, "final iterate has non-finite components");
  if (options.record_iterates) result.iterates.push_back(result.final_x);

  if (std::holds_alternative<LastOutput>(mode)) {
    result.output_index = T;
  } else if (random_pick) {
    result.output_index = *random_pick;
  }
  return result;
}

/// Uses the oracle's own starting point.
template <GradientOracle Oracle>
  requires requires(const Oracle& o, std::uint64_t s) { { o.initial_point(s) } -> std::convertible_to<Vector>; }
RunResult run_experiment(Oracle& oracle, const MomentumConfig& cfg, const ScheduleSpec& schedule,
                         std::int64_t T, const OutputMode& mode, std::uint64_t seed,
                         Formulation formulation, const RunOptions& options = {}) {
  return run_experiment(oracle, oracle.initial_point(seed), cfg, schedule, T, mode, seed, formulation,
                        options);
}

}  // namespace summ
