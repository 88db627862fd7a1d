#pragma once

// Stochastic unified momentum: one update family parameterised by the
// momentum constant mu and the interpolation factor lambda. lambda = 0 is
// stochastic heavy ball, lambda = 1 is stochastic Nesterov. Three algebraically
// equivalent formulations are provided; they differ only in which buffers they
// keep between steps.

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "summ/types.hpp"

namespace summ {

class MomentumConfig {
public:
  double mu() const noexcept { return mu_; }
  double lambda() const noexcept { return lambda_; }
  /// (1 - mu) * lambda, always in [0, 1].
  double lambda_tilde() const noexcept { return lambda_tilde_; }

  /// Largest admissible interpolation factor for a given momentum constant.
  static double max_lambda(double mu) { return 1.0 / (1.0 - mu); }

  friend MomentumConfig make_config(double mu, double lambda);

private:
  MomentumConfig(double mu, double lambda)
      : mu_(mu), lambda_(lambda), lambda_tilde_((1.0 - mu) * lambda) {}

  double mu_;
  double lambda_;
  double lambda_tilde_;
};

inline MomentumConfig make_config(double mu, double lambda) {
  if (!std::isfinite(mu) || mu < 0.0 || mu >= 1.0) {
    std::ostringstream msg;
    msg << "momentum constant mu=" << mu << " must lie in [0, 1)";
    throw DomainError(msg.str());
  }
  const double upper = MomentumConfig::max_lambda(mu);
  if (!std::isfinite(lambda) || lambda < 0.0 || lambda > upper) {
    std::ostringstream msg;
    msg << "interpolation factor lambda=" << lambda << " must lie in [0, 1/(1-mu)] = [0, "
        << upper << "] for mu=" << mu;
    throw DomainError(msg.str());
  }
  return MomentumConfig(mu, lambda);
}

enum class Formulation {
  unified,     ///< x and one momentum buffer
  two_step,    ///< x, current and previous momentum
  three_step,  ///< x and the two auxiliary iterates y, y~
};

inline std::string_view to_string(Formulation f) {
  switch (f) {
    case Formulation::unified: return "unified";
    case Formulation::two_step: return "two_step";
    case Formulation::three_step: return "three_step";
  }
  return "?";
}

inline Formulation parse_formulation(std::string_view s) {
  if (s == "unified") return Formulation::unified;
  if (s == "two_step") return Formulation::two_step;
  if (s == "three_step") return Formulation::three_step;
  throw std::invalid_argument("unknown formulation '" + std::string(s) +
                              "' (expected unified, two_step or three_step)");
}

struct MomentumState {
  Vector x;
  Vector m;
  std::int64_t t = 1;
};

struct TwoStepState {
  Vector x;
  Vector m_curr;
  Vector m_prev;
  std::int64_t t = 1;
};

struct ThreeStepState {
  Vector x;
  Vector y;
  Vector y_tilde;
  std::int64_t t = 1;
};

namespace detail {

inline void require_nonempty(const Vector& x1) {
  if (x1.size() == 0) throw DimensionError("initial point must have dimension >= 1");
  if (!x1.allFinite()) throw DomainError("initial point has non-finite components");
}

inline void check_step_inputs(const Vector& x, double eta, const Vector& g) {
  require_same_dim(x.size(), g.size(), "gradient");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw DomainError("step size must be positive and finite, got " + std::to_string(eta));
  }
  if (!g.allFinite()) throw DomainError("gradient has non-finite components");
}

}  // namespace detail

inline MomentumState init_state(Vector x1) {
  detail::require_nonempty(x1);
  const Index d = x1.size();
  return MomentumState{std::move(x1), Vector::Zero(d), 1};
}

inline TwoStepState init_two_step_state(Vector x1) {
  detail::require_nonempty(x1);
  const Index d = x1.size();
  return TwoStepState{std::move(x1), Vector::Zero(d), Vector::Zero(d), 1};
}

inline ThreeStepState init_three_step_state(Vector x1) {
  detail::require_nonempty(x1);
  Vector y = x1;
  Vector y_tilde = x1;
  return ThreeStepState{std::move(x1), std::move(y), std::move(y_tilde), 1};
}

/// m <- mu m - eta g, then x <- x - lambda eta g + (1 - lambda~) m.
/// The momentum buffer is updated first and the new value feeds the x update.
inline void advance(MomentumState& s, const MomentumConfig& cfg, double eta, const Vector& g) {
  detail::check_step_inputs(s.x, eta, g);
  s.m = cfg.mu() * s.m - eta * g;
  s.x += -cfg.lambda() * eta * g + (1.0 - cfg.lambda_tilde()) * s.m;
  ++s.t;
}

/// m' = mu m - eta g, x <- x + m' + lambda mu (m' - m).
inline void advance(TwoStepState& s, const MomentumConfig& cfg, double eta, const Vector& g) {
  detail::check_step_inputs(s.x, eta, g);
  s.m_prev.swap(s.m_curr);
  s.m_curr = cfg.mu() * s.m_prev - eta * g;
  s.x += s.m_curr + cfg.lambda() * cfg.mu() * (s.m_curr - s.m_prev);
  ++s.t;
}

/// y' = x - eta g, y~' = x - lambda eta g, x <- y' + mu (y~' - y~).
inline void advance(ThreeStepState& s, const MomentumConfig& cfg, double eta, const Vector& g) {
  detail::check_step_inputs(s.x, eta, g);
  Vector y_tilde_next = s.x - cfg.lambda() * eta * g;
  s.y = s.x - eta * g;
  s.x = s.y + cfg.mu() * (y_tilde_next - s.y_tilde);
  s.y_tilde.swap(y_tilde_next);
  ++s.t;
}

inline MomentumState unified_step(MomentumState s, const MomentumConfig& cfg, double eta,
                                  const Vector& g) {
  advance(s, cfg, eta, g);
  return s;
}

inline TwoStepState two_step_update(TwoStepState s, const MomentumConfig& cfg, double eta,
                                    const Vector& g) {
  advance(s, cfg, eta, g);
  return s;
}

inline ThreeStepState three_step_update(ThreeStepState s, const MomentumConfig& cfg, double eta,
                                        const Vector& g) {
  advance(s, cfg, eta, g);
  return s;
}

}  // namespace summ
