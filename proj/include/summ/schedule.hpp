#pragma once

// Piecewise step sizes: constant alpha for the first K steps, then a
// polynomial decay alpha / (t - K)^p. The family satisfies
// sum eta = inf, sum eta^2 < inf and eta_{t-1}/eta_t -> 1 exactly when
// p lies in (1/2, 1].

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "summ/types.hpp"

namespace summ {

struct ScheduleSpec {
  double alpha = 0.0;
  std::int64_t K = 0;
  double p = 1.0;
};

inline ScheduleSpec make_schedule(double alpha, std::int64_t K, double p) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("schedule alpha must be positive and finite, got " + std::to_string(alpha));
  }
  if (K < 0) throw DomainError("schedule K must be >= 0, got " + std::to_string(K));
  if (!std::isfinite(p) || p < 0.0) {
    throw DomainError("schedule decay exponent p must be finite and >= 0, got " +
                      std::to_string(p));
  }
  return ScheduleSpec{alpha, K, p};
}

/// Constant-phase length from a fraction of the horizon, truncated toward
/// zero. A relative slack of 1e-9 absorbs representation error, so
/// 0.9 * 23450 gives 21105 rather than 21104.
inline std::int64_t k_from_fraction(double fraction, std::int64_t horizon) {
  if (!std::isfinite(fraction) || fraction < 0.0) {
    throw DomainError("K fraction must be finite and >= 0, got " + std::to_string(fraction));
  }
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  const long double raw = static_cast<long double>(fraction) * static_cast<long double>(horizon);
  return static_cast<std::int64_t>(std::floor(raw * (1.0L + 1e-9L)));
}

inline double step_size(const ScheduleSpec& spec, std::int64_t t) {
  if (t < 1) throw DomainError("step index must be >= 1, got " + std::to_string(t));
  if (t <= spec.K) return spec.alpha;
  return spec.alpha / std::pow(static_cast<double>(t - spec.K), spec.p);
}

/// (1 - mu) * sum_{k<=t} mu^{t-k} eta_k, the geometric average of past steps.
inline double smoothed_step(const ScheduleSpec& spec, double mu, std::int64_t t) {
  if (t < 1) throw DomainError("step index must be >= 1, got " + std::to_string(t));
  if (!(mu >= 0.0 && mu < 1.0)) throw DomainError("mu must lie in [0, 1)");
  double acc = 0.0;
  for (std::int64_t k = 1; k <= t; ++k) acc = mu * acc + step_size(spec, k);
  return (1.0 - mu) * acc;
}

inline bool is_theorem_compliant(const ScheduleSpec& spec) { return spec.p > 0.5 && spec.p <= 1.0; }

struct ScheduleReport {
  bool compliant = false;
  std::vector<std::int64_t> sample_t;
  std::vector<double> partial_sum;     ///< sum_{k<=t} eta_k at sample_t
  std::vector<double> partial_sum_sq;  ///< sum_{k<=t} eta_k^2 at sample_t
  std::vector<std::int64_t> ratio_t;
  std::vector<double> ratio;           ///< eta_{t-1} / eta_t at ratio_t
  std::string reason;
};

/// The verdict is analytic (p alone); the sums are illustrative evidence only
/// because no finite prefix can prove divergence.
inline ScheduleReport validate_schedule(const ScheduleSpec& spec, std::int64_t horizon) {
  if (horizon < 10) throw DomainError("validation horizon must be >= 10");
  ScheduleReport report;
  report.compliant = is_theorem_compliant(spec);
  if (report.compliant) {
    report.reason = "p in (1/2, 1]: sum of steps diverges, sum of squares converges, ratio -> 1";
  } else if (spec.p <= 0.5) {
    report.reason = "p <= 1/2: sum of squared steps diverges";
  } else {
    report.reason = "p > 1: sum of steps converges";
  }

  std::int64_t next_sample = 1;
  double s = 0.0;
  double s2 = 0.0;
  double prev = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double eta = step_size(spec, t);
    s += eta;
    s2 += eta * eta;
    if (t == next_sample || t == horizon) {
      report.sample_t.push_back(t);
      report.partial_sum.push_back(s);
      report.partial_sum_sq.push_back(s2);
      if (t > 1) {
        report.ratio_t.push_back(t);
        report.ratio.push_back(prev / eta);
      }
      if (t == next_sample) next_sample *= 2;
    }
    prev = eta;
  }
  return report;
}

/// ceil(n_samples / batch) * epochs.
inline std::int64_t iterations_for(std::int64_t n_samples, std::int64_t batch, std::int64_t epochs) {
  if (n_samples < 1 || batch < 1 || epochs < 1) {
    throw DomainError("iterations_for requires n_samples, batch and epochs >= 1");
  }
  return ((n_samples + batch - 1) / batch) * epochs;
}

}  // namespace summ
