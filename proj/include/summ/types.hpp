#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace summ {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Generator used for every seeded stream in the library (gradient noise,
/// mini-batch draws, weight init, random output selection).
using Rng = std::mt19937_64;

/// A parameter outside its admissible domain (mu, lambda, step sizes, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the loss or an iterate stops being finite.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(std::int64_t step, const std::string& what)
      : std::runtime_error("diverged at step " + std::to_string(step) + ": " + what),
        step_(step) {}

  std::int64_t step() const noexcept { return step_; }

private:
  std::int64_t step_;
};

namespace detail {

inline void require_same_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Uniform double in [lo, hi) built from raw generator bits so that noise
// streams do not depend on the standard library's distribution internals.
inline double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// Uniform integer in [0, n) by rejection on raw bits.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % n;
}

}  // namespace detail
}  // namespace summ
