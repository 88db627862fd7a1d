#pragma once

// Multi-seed aggregation and numeric consistency probes. Nothing here proves
// a limit; verdicts say "consistent" when a finite prefix shows the expected
// shape and name the first failed hypothesis otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "summ/problems.hpp"
#include "summ/trajectory.hpp"

namespace summ {

enum class Metric { loss, full_loss, grad_norm, eta };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::loss: return "loss";
    case Metric::full_loss: return "full_loss";
    case Metric::grad_norm: return "grad_norm";
    case Metric::eta: return "eta";
  }
  return "?";
}

inline std::optional<double> metric_value(const StepRecord& s, Metric m) {
  switch (m) {
    case Metric::loss: return s.loss;
    case Metric::full_loss: return s.full_loss;
    case Metric::grad_norm: return s.grad_norm;
    case Metric::eta: return s.eta;
  }
  return std::nullopt;
}

struct AggregateCurve {
  Metric metric = Metric::loss;
  std::vector<std::int64_t> t;
  std::vector<double> mean;
  std::vector<double> stddev;  ///< population standard deviation across seeds
  std::size_t seeds = 0;
};

namespace detail {

struct Series {
  std::vector<std::int64_t> t;
  std::vector<double> v;
};

inline Series extract(const TrajectoryRecord& traj, Metric m) {
  Series s;
  for (const auto& step : traj.steps) {
    if (auto v = metric_value(step, m)) {
      s.t.push_back(step.t);
      s.v.push_back(*v);
    }
  }
  return s;
}

}  // namespace detail

/// Pointwise mean and population std of a metric across runs that share the
/// same checkpoint grid.
inline AggregateCurve aggregate_seeds(const std::vector<TrajectoryRecord>& runs, Metric metric) {
  if (runs.empty()) throw std::invalid_argument("aggregate_seeds needs at least one trajectory");
  AggregateCurve curve;
  curve.metric = metric;
  curve.seeds = runs.size();
  std::vector<detail::Series> series;
  series.reserve(runs.size());
  for (const auto& r : runs) series.push_back(detail::extract(r, metric));
  curve.t = series.front().t;
  if (curve.t.empty()) {
    throw std::invalid_argument("metric '" + std::string(to_string(metric)) + "' is never recorded");
  }
  for (const auto& s : series) {
    if (s.t != curve.t) throw std::invalid_argument("checkpoint grids differ between trajectories");
  }
  const double k = static_cast<double>(series.size());
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    double sum = 0.0;
    for (const auto& s : series) sum += s.v[i];
    const double mean = sum / k;
    double var = 0.0;
    for (const auto& s : series) var += (s.v[i] - mean) * (s.v[i] - mean);
    curve.mean.push_back(mean);
    curve.stddev.push_back(std::sqrt(var / k));
  }
  return curve;
}

/// Last-iterate, best-iterate and running-average views of the seed-mean
/// squared gradient norm, plus a terminal loss level.
struct ConvergenceReport {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> mean_sq;  ///< seed mean of ||grad f(x_t)||^2 at each checkpoint
  double last_sq = 0.0;
  double min_sq = 0.0;
  double avg_sq = 0.0;
  std::int64_t argmin_t = 0;
  std::optional<double> terminal_loss;  ///< mean full loss over the final 5 checkpoints
  bool min_le_avg = false;
  bool min_le_last = false;
  std::size_t seeds = 0;
};

inline ConvergenceReport convergence_report(const std::vector<TrajectoryRecord>& runs) {
  if (runs.empty()) throw std::invalid_argument("convergence_report needs at least one trajectory");
  std::vector<detail::Series> norms;
  for (const auto& r : runs) {
    norms.push_back(detail::extract(r, Metric::grad_norm));
    if (norms.back().t.empty()) throw std::invalid_argument("trajectory has no gradient norms");
    if (norms.back().t != norms.front().t) throw std::invalid_argument("checkpoint grids differ between trajectories");
  }
  ConvergenceReport rep;
  rep.seeds = runs.size();
  rep.checkpoints = norms.front().t;
  const double k = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < rep.checkpoints.size(); ++i) {
    double s = 0.0;
    for (const auto& n : norms) s += n.v[i] * n.v[i];
    rep.mean_sq.push_back(s / k);
  }
  rep.last_sq = rep.mean_sq.back();
  const auto it = std::min_element(rep.mean_sq.begin(), rep.mean_sq.end());
  rep.min_sq = *it;
  rep.argmin_t = rep.checkpoints[static_cast<std::size_t>(it - rep.mean_sq.begin())];
  double total = 0.0;
  for (double v : rep.mean_sq) total += v;
  rep.avg_sq = total / static_cast<double>(rep.mean_sq.size());
  rep.min_le_avg = rep.min_sq <= rep.avg_sq;
  rep.min_le_last = rep.min_sq <= rep.last_sq;

  bool have_loss = true;
  for (const auto& r : runs) have_loss = have_loss && !detail::extract(r, Metric::full_loss).t.empty();
  if (have_loss) {
    const auto curve = aggregate_seeds(runs, Metric::full_loss);
    const std::size_t tail = std::min<std::size_t>(5, curve.mean.size());
    double s = 0.0;
    for (std::size_t i = curve.mean.size() - tail; i < curve.mean.size(); ++i) s += curve.mean[i];
    rep.terminal_loss = s / static_cast<double>(tail);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sequence probe: three non-negative sequences a, b, a~ with
//   sum a = inf, sum a b^p < inf, a / a~ -> 1, |b_{n+1} - b_n| <= C a~_n b_n^{p-eps}
// should force b -> 0. Series behaviour is read off dyadic block sums
// S_k = sum_{2^k <= n < 2^{k+1}} x_n: for x_n ~ n^{-q} consecutive blocks
// shrink by 2^{1-q}, so a ratio near 1 means divergence and a ratio clearly
// below 1 means convergence.

struct SequenceProbeInput {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> a_tilde;
  double C = 1.0;
  double p = 2.0;
  double eps = 0.0;
};

enum class ProbeVerdict { consistent, hypothesis_violated, inconsistent };

inline std::string_view to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::consistent: return "consistent";
    case ProbeVerdict::hypothesis_violated: return "hypothesis violated";
    case ProbeVerdict::inconsistent: return "inconsistent";
  }
  return "?";
}

struct SequenceProbeReport {
  bool sum_a_diverges = false;
  bool sum_a_bp_converges = false;
  bool ratio_tends_to_one = false;
  bool increment_bound_holds = false;
  bool b_tail_small = false;
  double block_ratio_a = 0.0;     ///< last dyadic block sum of a over the previous one
  double block_ratio_a_bp = 0.0;  ///< same for a * b^p
  double max_ratio_gap_tail = 0.0;
  std::int64_t first_increment_violation = -1;  ///< 1-based n, -1 if none
  double b_tail_max = 0.0;
  ProbeVerdict verdict = ProbeVerdict::inconsistent;
  std::vector<std::string> violations;
};

struct SequenceProbeOptions {
  double divergence_ratio = 0.9;   ///< block ratio at or above this counts as divergent
  double tail_tolerance = 0.1;     ///< b over the second half of the prefix must stay below this
  double relative_slack = 1e-12;   ///< rounding allowance in the increment bound
};

namespace detail {

// Sums over the last two complete dyadic blocks. Block j covers the 1-based
// indices [2^j, 2^{j+1}); the last complete block has 2^{j+1} - 1 <= N.
template <class F>
std::pair<double, double> last_two_blocks(std::size_t N, F&& value) {
  std::size_t j = 1;
  while (((std::size_t{1} << (j + 2)) - 1) <= N) ++j;
  auto block = [&](std::size_t jj) {
    double s = 0.0;
    for (std::size_t n = std::size_t{1} << jj; n < (std::size_t{1} << (jj + 1)); ++n) s += value(n);
    return s;
  };
  return {block(j - 1), block(j)};
}

inline double block_ratio(double prev, double last) {
  if (prev == 0.0) return last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return last / prev;
}

}  // namespace detail

inline SequenceProbeReport sequence_probe(const SequenceProbeInput& in, const SequenceProbeOptions& opt = {}) {
  const std::size_t N = in.a.size();
  if (N < 100) throw std::invalid_argument("sequence_probe needs sequences of length >= 100");
  if (in.b.size() != N || in.a_tilde.size() != N) throw std::invalid_argument("sequences must have equal length");
  if (!(in.C > 0.0) || !(in.p > 0.0) || in.eps < 0.0 || in.eps > in.p) {
    throw std::invalid_argument("need C > 0, p > 0 and eps in [0, p]");
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!(in.a[i] >= 0.0) || !(in.b[i] >= 0.0) || !(in.a_tilde[i] >= 0.0)) {
      throw std::invalid_argument("sequence entries must be non-negative (index " + std::to_string(i + 1) + ")");
    }
  }
  auto at = [](const std::vector<double>& v, std::size_t n) { return v[n - 1]; };

  SequenceProbeReport rep;
  auto [a_prev, a_last] = detail::last_two_blocks(N, [&](std::size_t n) { return at(in.a, n); });
  rep.block_ratio_a = detail::block_ratio(a_prev, a_last);
  rep.sum_a_diverges = a_last > 0.0 && rep.block_ratio_a >= opt.divergence_ratio;

  auto [w_prev, w_last] = detail::last_two_blocks(
      N, [&](std::size_t n) { return at(in.a, n) * std::pow(at(in.b, n), in.p); });
  rep.block_ratio_a_bp = detail::block_ratio(w_prev, w_last);
  rep.sum_a_bp_converges = rep.block_ratio_a_bp < opt.divergence_ratio;

  // |a/a~ - 1| over the last block must not exceed its value over the previous one.
  auto gap = [&](std::size_t n) {
    const double a = at(in.a, n), at_ = at(in.a_tilde, n);
    if (at_ == 0.0) return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(a / at_ - 1.0);
  };
  double gap_prev = 0.0, gap_last = 0.0;
  const std::size_t half = N / 2;
  for (std::size_t n = half / 2 + 1; n <= half; ++n) gap_prev = std::max(gap_prev, gap(n));
  for (std::size_t n = half + 1; n <= N; ++n) gap_last = std::max(gap_last, gap(n));
  rep.max_ratio_gap_tail = gap_last;
  rep.ratio_tends_to_one = std::isfinite(gap_last) && (gap_last <= gap_prev || gap_last <= 1e-9);

  rep.increment_bound_holds = true;
  for (std::size_t n = 1; n < N; ++n) {
    const double inc = std::abs(at(in.b, n + 1) - at(in.b, n));
    const double bound = in.C * at(in.a_tilde, n) * std::pow(at(in.b, n), in.p - in.eps);
    if (inc > bound * (1.0 + opt.relative_slack) + opt.relative_slack * std::abs(at(in.b, n))) {
      rep.increment_bound_holds = false;
      rep.first_increment_violation = static_cast<std::int64_t>(n);
      break;
    }
  }

  for (std::size_t n = half + 1; n <= N; ++n) rep.b_tail_max = std::max(rep.b_tail_max, at(in.b, n));
  rep.b_tail_small = rep.b_tail_max <= opt.tail_tolerance;

  if (!rep.sum_a_diverges) rep.violations.emplace_back("sum of a does not diverge");
  if (!rep.sum_a_bp_converges) rep.violations.emplace_back("sum of a*b^p does not converge");
  if (!rep.ratio_tends_to_one) rep.violations.emplace_back("a/a_tilde does not approach 1");
  if (!rep.increment_bound_holds) {
    rep.violations.emplace_back("increment bound fails at n=" + std::to_string(rep.first_increment_violation));
  }
  if (!rep.violations.empty()) {
    rep.verdict = ProbeVerdict::hypothesis_violated;
  } else {
    rep.verdict = rep.b_tail_small ? ProbeVerdict::consistent : ProbeVerdict::inconsistent;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Descent probe: the seed-mean full loss should behave like an almost
// supermartingale, decreasing up to upward excursions whose total stays
// bounded. Qualitative only.

struct DescentProbeReport {
  std::vector<std::int64_t> t;
  std::vector<double> mean_loss;
  std::size_t excursions = 0;       ///< number of upward moves
  double excursion_total = 0.0;     ///< summed size of upward moves
  double excursion_first_half = 0.0;
  double excursion_second_half = 0.0;
  double gap_to_f_star = 0.0;       ///< final mean loss minus the declared lower bound
  bool bounded = false;
  bool stabilizing = false;
  std::string label = "qualitative diagnostic";
  std::string summary;
};

inline DescentProbeReport descent_probe(const std::vector<TrajectoryRecord>& runs, const ProblemMetadata& meta) {
  if (runs.empty()) throw std::invalid_argument("descent_probe needs at least one trajectory");
  for (const auto& r : runs) {
    if (detail::extract(r, Metric::full_loss).t.empty()) {
      throw std::invalid_argument("descent_probe needs full_loss checkpoints");
    }
  }
  const auto curve = aggregate_seeds(runs, Metric::full_loss);
  DescentProbeReport rep;
  rep.t = curve.t;
  rep.mean_loss = curve.mean;
  const std::size_t n = curve.mean.size();
  const double scale = std::max({1.0, std::abs(curve.mean.front()), std::abs(meta.f_star)});
  for (std::size_t i = 1; i < n; ++i) {
    const double up = curve.mean[i] - curve.mean[i - 1];
    if (!std::isfinite(up)) {
      rep.excursion_total = std::numeric_limits<double>::infinity();
      rep.excursion_second_half = rep.excursion_total;
      ++rep.excursions;
      continue;
    }
    if (up > 1e-12 * scale) {
      ++rep.excursions;
      rep.excursion_total += up;
      (i <= n / 2 ? rep.excursion_first_half : rep.excursion_second_half) += up;
    }
  }
  const double last = curve.mean.back();
  rep.gap_to_f_star = last - meta.f_star;
  // Bounded: upward movement does not grow over time and the sequence does
  // not end above where it started.
  rep.bounded = std::isfinite(rep.excursion_total) && last <= curve.mean.front() &&
                rep.excursion_second_half <= 1.5 * rep.excursion_first_half + 1e-12 * scale;
  if (n >= 4) {
    const std::size_t q = n - n / 4;
    double lo = curve.mean[q], hi = curve.mean[q];
    for (std::size_t i = q; i < n; ++i) {
      lo = std::min(lo, curve.mean[i]);
      hi = std::max(hi, curve.mean[i]);
    }
    const double spread0 = std::abs(curve.mean.front() - last) + 1e-12 * scale;
    rep.stabilizing = std::isfinite(hi) && (hi - lo) <= 0.5 * spread0 + 1e-9 * scale;
  } else {
    rep.stabilizing = std::isfinite(last);
  }
  rep.summary = std::to_string(rep.excursions) + " upward excursions totalling " +
                std::to_string(rep.excursion_total) + (rep.bounded ? "; bounded" : "; unbounded") +
                (rep.stabilizing ? ", stabilizing" : ", not stabilizing");
  return rep;
}

}  // namespace summ
