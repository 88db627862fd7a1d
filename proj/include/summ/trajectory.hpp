#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "summ/momentum.hpp"
#include "summ/schedule.hpp"

namespace summ {

/// Values observed at iterate x_t, i.e. before the t-th update is applied.
struct StepRecord {
  std::int64_t t = 0;
  double eta = 0.0;
  double loss = 0.0;                      ///< mini-batch loss (exact loss for synthetic problems)
  std::optional<double> full_loss;        ///< full-objective loss at checkpoints
  std::optional<double> grad_norm;        ///< ||grad f(x_t)|| at checkpoints
  std::optional<double> grad_dot_momentum;  ///< grad f(x_t)^T m_t where a momentum buffer exists
  bool outside_region = false;
  double wall_ms = 0.0;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  double mu = 0.0;
  double lambda = 0.0;
  ScheduleSpec schedule;
  Formulation formulation = Formulation::unified;
  std::vector<StepRecord> steps;
  std::string note;  ///< free-form provenance, e.g. how grad_norm was evaluated

  std::int64_t horizon() const { return steps.empty() ? 0 : steps.back().t; }
};

struct LastOutput {};
struct RandomOutput {
  std::uint64_t seed = 0;
};
struct MinimumOutput {};

/// Which iterate a run reports: the last one, a uniformly drawn one, or the
/// one with the smallest recorded full-gradient norm.
using OutputMode = std::variant<LastOutput, RandomOutput, MinimumOutput>;

inline std::string to_string(const OutputMode& mode) {
  if (std::holds_alternative<LastOutput>(mode)) return "last";
  if (std::holds_alternative<MinimumOutput>(mode)) return "minimum";
  return "random";
}

inline OutputMode parse_output_mode(const std::string& s, std::uint64_t random_seed = 0) {
  if (s == "last") return LastOutput{};
  if (s == "minimum") return MinimumOutput{};
  if (s == "random") return RandomOutput{random_seed};
  throw std::invalid_argument("unknown output mode '" + s + "' (expected last, random or minimum)");
}

/// Uniform draw of an index in [1, horizon] from the mode's own generator.
/// Depends only on (seed, horizon), so it can be taken before or after a run.
inline std::int64_t draw_random_index(std::uint64_t seed, std::int64_t horizon) {
  Rng rng(seed);
  return 1 + static_cast<std::int64_t>(detail::uniform_index(rng, static_cast<std::uint64_t>(horizon)));
}

/// Selects the reported step index from a trajectory. Minimum mode considers
/// every step carrying a gradient norm and breaks ties by the earliest index.
inline std::int64_t select_output(const TrajectoryRecord& traj, const OutputMode& mode) {
  if (traj.steps.empty()) throw std::invalid_argument("cannot select output from an empty trajectory");
  if (std::holds_alternative<LastOutput>(mode)) return traj.steps.back().t;
  if (const auto* r = std::get_if<RandomOutput>(&mode)) {
    const auto pick = draw_random_index(r->seed, static_cast<std::int64_t>(traj.steps.size()));
    return traj.steps[static_cast<std::size_t>(pick - 1)].t;
  }
  std::optional<std::int64_t> best_t;
  double best = 0.0;
  for (const auto& s : traj.steps) {
    if (!s.grad_norm) continue;
    if (!best_t || *s.grad_norm < best) {
      best = *s.grad_norm;
      best_t = s.t;
    }
  }
  if (!best_t) throw std::invalid_argument("minimum output needs recorded full-gradient norms");
  return *best_t;
}

/// Convenience lookup of the record for step t (trajectories are dense in t).
inline const StepRecord& step_at(const TrajectoryRecord& traj, std::int64_t t) {
  if (t < 1 || t > static_cast<std::int64_t>(traj.steps.size()) ||
      traj.steps[static_cast<std::size_t>(t - 1)].t != t) {
    throw std::out_of_range("no record for step " + std::to_string(t));
  }
  return traj.steps[static_cast<std::size_t>(t - 1)];
}

}  // namespace summ
