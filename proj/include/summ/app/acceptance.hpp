#pragma once

// Acceptance checks behind `summ verify`. Each check recomputes its
// reference independently of the code path under test (plain loops, closed
// forms, finite differences) and reports one pass/fail line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "summ/app/experiment.hpp"

namespace summ::app {

enum class Scope { fast, full };

inline Scope parse_scope(const std::string& s) {
  if (s == "fast") return Scope::fast;
  if (s == "full") return Scope::full;
  throw std::invalid_argument("unknown scope '" + s + "' (expected fast or full)");
}

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct MnistFiles {
  std::string train_images, train_labels, test_images, test_labels;
};

/// Finds the four MNIST files in a directory, accepting raw or gzipped IDX
/// under either common naming scheme.
inline MnistFiles resolve_mnist(const std::string& dir) {
  const char* keys_hint =
      "set data.train_images, data.train_labels, data.test_images and data.test_labels, or pass --data-dir";
  if (dir.empty()) throw DataMissingError(std::string("MNIST data missing: ") + keys_hint);
  auto find = [&](const char* stem, const char* key) {
    for (const std::string sep : {"-", "."}) {
      std::string base = stem;
      if (sep == ".") base[base.find("-idx")] = '.';  // train-images.idx3-ubyte
      for (const char* ext : {"", ".gz"}) {
        const auto p = std::filesystem::path(dir) / (base + ext);
        if (std::filesystem::exists(p)) return p.string();
      }
    }
    throw DataMissingError(std::string("MNIST data missing: no ") + stem + " in '" + dir + "' (" + key + "); " +
                           keys_hint);
  };
  return {find("train-images-idx3-ubyte", "data.train_images"), find("train-labels-idx1-ubyte", "data.train_labels"),
          find("t10k-images-idx3-ubyte", "data.test_images"), find("t10k-labels-idx1-ubyte", "data.test_labels")};
}

namespace acceptance {

using Clock = std::chrono::steady_clock;

inline double max_abs_diff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return worst;
}

inline std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << v;
  return s.str();
}

/// Shared state: completed trajectories feed the output-mode check.
struct Context {
  std::vector<TrajectoryRecord> runs;
  std::string data_dir;
};

inline StochasticProblem reference_quadratic(double noise = 1.0) {
  return make_problem(ProblemKind::noisy_quadratic, 20, 100.0, noise, 0);
}

inline RunResult run_recorded(const StochasticProblem& problem, const MomentumConfig& cfg, const ScheduleSpec& s,
                              std::int64_t T, std::uint64_t seed, Formulation f) {
  StochasticProblem oracle = problem;
  RunOptions opts;
  opts.record_iterates = true;
  return run_experiment(oracle, cfg, s, T, LastOutput{}, seed, f, opts);
}

inline CriterionResult formulation_equivalence(Context& ctx) {
  CriterionResult r{1, "formulation equivalence"};
  const auto problem = reference_quadratic();
  constexpr std::int64_t T = 2000;
  // lambda = 10 moves x by 10 * eta * g, so eta * L must stay below 0.2.
  const auto sched = make_schedule(0.001, k_from_fraction(0.9, T), 1.0);
  double worst_two = 0.0, worst_three = 0.0;
  for (double lambda : {0.0, 0.5, 1.0, 5.0, 10.0}) {
    const auto cfg = make_config(0.9, lambda);
    auto u = run_recorded(problem, cfg, sched, T, 7, Formulation::unified);
    auto two = run_recorded(problem, cfg, sched, T, 7, Formulation::two_step);
    auto three = run_recorded(problem, cfg, sched, T, 7, Formulation::three_step);
    worst_two = std::max(worst_two, max_abs_diff(u.iterates, two.iterates));
    worst_three = std::max(worst_three, max_abs_diff(u.iterates, three.iterates));
    ctx.runs.push_back(std::move(u.trajectory));
  }
  r.passed = worst_two <= 1e-8 && worst_three <= 1e-8;
  r.detail = "max|unified-two_step|=" + sci(worst_two) + " max|unified-three_step|=" + sci(worst_three) +
             " (tol 1e-8)";
  return r;
}

inline CriterionResult first_step_closed_form() {
  CriterionResult r{2, "first-step closed form"};
  Rng rng(20240611);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 1 + static_cast<Index>(detail::uniform_index(rng, 40));
    const double mu = detail::uniform(rng, 0.0, 0.95);
    const double lambda = detail::uniform(rng, 0.0, 1.0 / (1.0 - mu));
    const double eta = detail::uniform(rng, 1e-4, 1.0);
    Vector x1(d), g(d);
    for (Index i = 0; i < d; ++i) {
      x1[i] = detail::uniform(rng, -5.0, 5.0);
      g[i] = detail::uniform(rng, -5.0, 5.0);
    }
    const auto cfg = make_config(mu, lambda);
    Vector expected(d);
    for (Index i = 0; i < d; ++i) expected[i] = x1[i] - (1.0 + mu * lambda) * eta * g[i];
    for (auto f : {Formulation::unified, Formulation::two_step, Formulation::three_step}) {
      Stepper s(f, x1);
      s.advance(cfg, eta, g);
      worst = std::max(worst, (s.x() - expected).cwiseAbs().maxCoeff());
    }
  }
  r.passed = worst <= 1e-12;
  r.detail = "50 configs x 3 formulations, max deviation " + sci(worst) + " (tol 1e-12)";
  return r;
}

inline CriterionResult sgd_reduction(Context& ctx) {
  CriterionResult r{3, "SGD reduction at mu=0"};
  const auto problem = reference_quadratic();
  constexpr std::int64_t T = 1000;
  const auto sched = make_schedule(0.01, k_from_fraction(0.9, T), 1.0);
  constexpr std::uint64_t seed = 11;

  // Plain SGD, sharing only the oracle and the seed.
  std::vector<Vector> sgd;
  {
    Rng rng(seed);
    Vector x = problem.initial_point();
    for (std::int64_t t = 1; t <= T; ++t) {
      sgd.push_back(x);
      const double eta = t <= sched.K ? sched.alpha : sched.alpha / std::pow(double(t - sched.K), sched.p);
      x -= eta * problem.sample_gradient(x, rng);
    }
    sgd.push_back(x);
  }
  double worst = 0.0;
  for (double lambda : {0.0, 0.3, 1.0}) {
    for (auto f : {Formulation::unified, Formulation::two_step, Formulation::three_step}) {
      auto run = run_recorded(problem, make_config(0.0, lambda), sched, T, seed, f);
      worst = std::max(worst, max_abs_diff(run.iterates, sgd));
      if (f == Formulation::unified) ctx.runs.push_back(std::move(run.trajectory));
    }
  }
  r.passed = worst <= 1e-12;
  r.detail = "lambda in {0,0.3,1}, all formulations, max deviation " + sci(worst) + " (tol 1e-12)";
  return r;
}

inline CriterionResult iteration_arithmetic() {
  CriterionResult r{4, "iteration arithmetic"};
  const auto a = iterations_for(60000, 128, 50);
  const auto b = iterations_for(50000, 128, 100);
  r.passed = a == 23450 && b == 39100;
  r.detail = "iterations_for(60000,128,50)=" + std::to_string(a) + " iterations_for(50000,128,100)=" +
             std::to_string(b);
  return r;
}

inline CriterionResult schedule_compliance() {
  CriterionResult r{5, "schedule compliance"};
  const bool verdicts = is_theorem_compliant(make_schedule(0.1, 10, 1.0)) &&
                        is_theorem_compliant(make_schedule(0.1, 10, 0.75)) &&
                        !is_theorem_compliant(make_schedule(0.1, 10, 0.4)) &&
                        !is_theorem_compliant(make_schedule(0.1, 10, 1.5));
  bool ratio_ok = true;
  std::int64_t first_bad = 0;
  for (double p : {1.0, 0.75}) {
    const auto s = make_schedule(0.1, 10, p);
    for (std::int64_t t = s.K + 11; t <= 100000; ++t) {
      const double ratio = step_size(s, t - 1) / step_size(s, t);
      if (std::abs(ratio - 1.0) > 10.0 / static_cast<double>(t)) {
        ratio_ok = false;
        first_bad = t;
        break;
      }
    }
  }
  r.passed = verdicts && ratio_ok;
  r.detail = std::string("verdicts ") + (verdicts ? "ok" : "WRONG") + ", |eta_{t-1}/eta_t-1|<=10/t to t=1e5 " +
             (ratio_ok ? "ok" : "fails at t=" + std::to_string(first_bad));
  return r;
}

// Frozen after calibration against reference runs. Condition 10 keeps
// alpha * L inside the stability range of both lambda = 0 and lambda = 1;
// the absolute bound scales linearly with the noise radius, the ratio does not.
inline constexpr double kC6Condition = 10.0;
inline constexpr double kC6Noise = 0.25;
inline constexpr double kC6Ratio = 0.2;
inline constexpr double kC6Absolute = 0.05;

inline CriterionResult last_iterate_convergence(Context& ctx) {
  CriterionResult r{6, "last-iterate convergence"};
  const auto problem = make_problem(ProblemKind::noisy_quadratic, 20, kC6Condition, kC6Noise, 0);
  constexpr std::int64_t T = 20000;
  const auto sched = make_schedule(0.1, k_from_fraction(0.9, T), 1.0);
  bool ok = true;
  std::ostringstream detail;
  for (double lambda : {0.0, 1.0}) {
    double early = 0.0, last = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      StochasticProblem oracle = problem;
      auto run = run_experiment(oracle, make_config(0.9, lambda), sched, T, LastOutput{}, seed, Formulation::unified);
      early += *step_at(run.trajectory, 2000).grad_norm / 5.0;
      last += *step_at(run.trajectory, T).grad_norm / 5.0;
      ctx.runs.push_back(std::move(run.trajectory));
    }
    const bool pass = last <= kC6Ratio * early && last <= kC6Absolute;
    ok = ok && pass;
    detail << "lambda=" << lambda << ": |grad| t=2000 " << fixed(early) << " -> t=T " << fixed(last) << " ratio "
           << fixed(last / early) << (pass ? "" : " FAIL") << "; ";
  }
  r.passed = ok;
  r.detail = detail.str() + "thresholds ratio<=" + fixed(kC6Ratio, 2) + " abs<=" + fixed(kC6Absolute, 2);
  return r;
}

inline CriterionResult output_mode_ordering(const Context& ctx) {
  CriterionResult r{7, "output-mode ordering"};
  std::size_t checked = 0, bad = 0;
  for (const auto& traj : ctx.runs) {
    const auto t_min = select_output(traj, MinimumOutput{});
    const auto t_last = select_output(traj, LastOutput{});
    const auto& last = step_at(traj, t_last);
    if (!last.grad_norm) continue;
    ++checked;
    if (!(*step_at(traj, t_min).grad_norm <= *last.grad_norm)) ++bad;
  }
  // The driver's own minimum-mode pick must agree with the offline selection.
  const auto problem = reference_quadratic();
  StochasticProblem oracle = problem;
  const auto run = run_experiment(oracle, make_config(0.9, 1.0), make_schedule(0.001, 450, 1.0), 500,
                                  MinimumOutput{}, 3, Formulation::unified);
  const bool driver_ok = run.output_index == select_output(run.trajectory, MinimumOutput{}) &&
                         *step_at(run.trajectory, run.output_index).grad_norm <=
                             *step_at(run.trajectory, 500).grad_norm &&
                         oracle.full_gradient(run.output_x).norm() ==
                             *step_at(run.trajectory, run.output_index).grad_norm;
  r.passed = checked > 0 && bad == 0 && driver_ok;
  r.detail = std::to_string(checked) + " runs checked, " + std::to_string(bad) + " violations, driver minimum pick " +
             (driver_ok ? "agrees" : "DISAGREES");
  return r;
}

inline CriterionResult gradient_correctness() {
  CriterionResult r{8, "gradient correctness"};
  // MLP 784 -> 8 -> 10 on three random inputs.
  const MlpModel model({784, 8, 10});
  Rng rng(808);
  Eigen::MatrixXd inputs(784, 3);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 784; ++i) inputs(i, j) = detail::uniform(rng, 0.0, 1.0);
  const std::vector<int> labels{3, 7, 1};
  Vector params = model.initial_parameters(5);
  for (Index i = 0; i < params.size(); ++i) params[i] += detail::uniform(rng, -0.05, 0.05);

  const Vector g = backward_grad(model, params, inputs, labels).grad;
  Vector fd(params.size());
  Vector p = params;
  for (Index i = 0; i < params.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(params[i]));
    p[i] = params[i] + h;
    const double up = forward_loss(model, p, inputs, labels);
    p[i] = params[i] - h;
    const double down = forward_loss(model, p, inputs, labels);
    p[i] = params[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  const double mlp_rel = (fd - g).norm() / std::max({fd.norm(), g.norm(), 1e-300});

  // Synthetic objectives at 100 points spread over the three problems.
  double synth_rel = 0.0;
  int points = 0;
  for (auto kind : {ProblemKind::noisy_quadratic, ProblemKind::noisy_rosenbrock, ProblemKind::logistic_synthetic}) {
    const auto problem = make_problem(kind, 10, 100.0, 0.0, 1);
    const auto& region = problem.metadata().region;
    const int n = kind == ProblemKind::noisy_quadratic ? 34 : 33;
    for (int k = 0; k < n; ++k, ++points) {
      Vector x(problem.dim());
      const double spread = region.max_norm ? region.radius : region.radius / std::sqrt(double(problem.dim()));
      for (Index i = 0; i < x.size(); ++i) x[i] = region.center[i] + detail::uniform(rng, -spread, spread);
      const Vector exact = problem.full_gradient(x);
      Vector approx(x.size());
      Vector y = x;
      for (Index i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
        y[i] = x[i] + h;
        const double up = problem.loss(y);
        y[i] = x[i] - h;
        const double down = problem.loss(y);
        y[i] = x[i];
        approx[i] = (up - down) / (2.0 * h);
      }
      synth_rel = std::max(synth_rel, (approx - exact).cwiseAbs().maxCoeff() / std::max(1.0, exact.cwiseAbs().maxCoeff()));
    }
  }
  r.passed = mlp_rel <= 1e-5 && synth_rel <= 1e-6;
  r.detail = "mlp relative error " + sci(mlp_rel) + " (tol 1e-5), synthetic worst over " + std::to_string(points) +
             " points " + sci(synth_rel) + " (tol 1e-6)";
  return r;
}

inline CriterionResult oracle_soundness() {
  CriterionResult r{9, "oracle soundness"};
  constexpr std::int64_t draws = 100000;
  bool unbiased = true, bounded = true;
  double worst_z = 0.0, worst_margin = -std::numeric_limits<double>::infinity();
  Rng point_rng(909);
  for (auto kind : {ProblemKind::noisy_quadratic, ProblemKind::noisy_rosenbrock, ProblemKind::logistic_synthetic}) {
    const auto problem = make_problem(kind, 10, 100.0, 1.0, 2);
    const auto& meta = problem.metadata();
    std::vector<Vector> points{problem.initial_point()};
    for (int k = 0; k < 2; ++k) {
      Vector x(problem.dim());
      const double spread =
          meta.region.max_norm ? meta.region.radius : meta.region.radius / std::sqrt(double(problem.dim()));
      for (Index i = 0; i < x.size(); ++i) x[i] = meta.region.center[i] + detail::uniform(point_rng, -spread, spread);
      points.push_back(x);
    }
    for (const auto& x : points) {
      if (!problem.in_operating_region(x)) {
        bounded = false;
        continue;
      }
      Rng rng(31337);
      const Vector exact = problem.full_gradient(x);
      Vector sum = Vector::Zero(x.size()), sum_sq = Vector::Zero(x.size());
      double norm_sq = 0.0, norm_sq2 = 0.0;
      for (std::int64_t n = 0; n < draws; ++n) {
        const Vector dev = problem.sample_gradient(x, rng) - exact;
        sum += dev;
        sum_sq += dev.cwiseAbs2();
        const double ns = (exact + dev).squaredNorm();
        norm_sq += ns;
        norm_sq2 += ns * ns;
      }
      const double k = static_cast<double>(draws);
      for (Index i = 0; i < x.size(); ++i) {
        const double mean = sum[i] / k;
        const double sd = std::sqrt(std::max(sum_sq[i] / k - mean * mean, 0.0));
        const double z = sd > 0.0 ? std::abs(mean) / (sd / std::sqrt(k)) : (mean == 0.0 ? 0.0 : INFINITY);
        worst_z = std::max(worst_z, z);
        if (z > 4.0) unbiased = false;
      }
      Rng est_rng(4242);
      const double second = problem.estimate_second_moment(x, draws, est_rng);
      const double m = norm_sq / k;
      const double band = 4.0 * std::sqrt(std::max(norm_sq2 / k - m * m, 0.0) / k);
      worst_margin = std::max(worst_margin, (second - meta.G_sq - band) / meta.G_sq);
      if (second > meta.G_sq + band) bounded = false;
    }
  }
  r.passed = unbiased && bounded;
  r.detail = "worst |mean noise| " + fixed(worst_z, 2) + " sigma (band 4), E||g||^2 within G^2 + band " +
             (bounded ? "everywhere" : "VIOLATED") + " (worst relative slack " + sci(worst_margin) + ")";
  return r;
}

inline CriterionResult mnist_desk_scale(Context& ctx) {
  CriterionResult r{10, "MNIST desk-scale sweep"};
  MnistFiles files;
  try {
    files = resolve_mnist(ctx.data_dir);
  } catch (const DataMissingError& err) {
    r.detail = err.what();
    return r;
  }
  std::ostringstream yaml;
  yaml << "problem.kind: mlp_mnist\nproblem.hidden: [128]\noptimizer.mu: 0.9\n"
       << "optimizer.lambda: [0, 0.5, 1, 5, 10]\nschedule.alpha: 0.01\nschedule.K_frac: 0.9\nschedule.p: 1\n"
       << "run.epochs: 5\nrun.batch: 128\nrun.seeds: [1, 2, 3]\n"
       << "data.train_images: \"" << files.train_images << "\"\ndata.train_labels: \"" << files.train_labels
       << "\"\ndata.test_images: \"" << files.test_images << "\"\ndata.test_labels: \"" << files.test_labels << "\"\n";
  const Experiment exp(parse_config(yaml.str(), "<mnist acceptance>"));

  bool monotone = true, accurate = true;
  std::vector<double> finals;
  std::ostringstream detail;
  for (double lambda : exp.config().lambdas) {
    std::vector<TrajectoryRecord> runs;
    double worst_acc = 1.0;
    for (auto seed : exp.config().seeds) {
      auto art = exp.run(lambda, seed);
      worst_acc = std::min(worst_acc, *art.test_accuracy);
      runs.push_back(art.result.trajectory);
      ctx.runs.push_back(std::move(art.result.trajectory));
    }
    const auto curve = aggregate_seeds(runs, Metric::full_loss);
    int non_increasing = 0;
    for (std::size_t i = 1; i < curve.mean.size(); ++i) non_increasing += curve.mean[i] <= curve.mean[i - 1] ? 1 : 0;
    const int transitions = static_cast<int>(curve.mean.size()) - 1;
    monotone = monotone && transitions == 5 && non_increasing >= 4;
    accurate = accurate && worst_acc >= 0.95;
    finals.push_back(curve.mean.back());
    detail << "lambda=" << lambda << ": loss " << fixed(curve.mean.back()) << ", " << non_increasing << "/"
           << transitions << " epochs non-increasing, min test acc " << fixed(100.0 * worst_acc, 2) << "%; ";
  }
  const double best = *std::min_element(finals.begin(), finals.end());
  const double worst = *std::max_element(finals.begin(), finals.end());
  const bool spread = worst <= 2.0 * best;
  r.passed = monotone && accurate && spread;
  detail << "final-loss spread " << fixed(worst / best, 3) << "x (limit 2)";
  r.detail = detail.str();
  return r;
}

inline CriterionResult sequence_probe_check() {
  CriterionResult r{11, "sequence probe"};
  constexpr std::size_t N = 100000;
  SequenceProbeInput worked{{}, {}, {}, 1.0, 2.0, 1.0};
  SequenceProbeInput harmonic{{}, {}, {}, 1.0, 2.0, 1.0};
  for (std::size_t n = 1; n <= N; ++n) {
    const double a = 1.0 / static_cast<double>(n);
    worked.a.push_back(a);
    worked.a_tilde.push_back(a);
    worked.b.push_back(std::pow(static_cast<double>(n), -0.3));
    harmonic.a.push_back(a);
    harmonic.a_tilde.push_back(a);
    harmonic.b.push_back(1.0);
  }
  const auto good = sequence_probe(worked);
  const auto bad = sequence_probe(harmonic);
  const bool named = bad.verdict == ProbeVerdict::hypothesis_violated &&
                     std::find(bad.violations.begin(), bad.violations.end(), "sum of a*b^p does not converge") !=
                         bad.violations.end();
  r.passed = good.verdict == ProbeVerdict::consistent && named;
  r.detail = "worked example: " + std::string(to_string(good.verdict)) + "; harmonic counterexample: " +
             std::string(to_string(bad.verdict)) + (bad.violations.empty() ? "" : " (" + bad.violations.front() + ")");
  return r;
}

template <class F>
CriterionResult timed(F&& f, double budget_seconds = 0.0) {
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = f();
  } catch (const std::exception& err) {
    r.passed = false;
    r.detail = std::string("exception: ") + err.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (budget_seconds > 0.0) {
    if (r.seconds >= budget_seconds) r.passed = false;
    r.detail += "; runtime " + fixed(r.seconds, 2) + " s (budget " + fixed(budget_seconds, 0) + " s)";
  }
  return r;
}

}  // namespace acceptance

/// Runs the acceptance checks for a scope; the MNIST sweep only in full scope.
inline std::vector<CriterionResult> run_acceptance(Scope scope, const std::string& data_dir = {}) {
  using namespace acceptance;
  Context ctx;
  ctx.data_dir = data_dir;
  std::vector<CriterionResult> out;
  auto add = [&](int id, const char* name, double budget, auto&& fn) {
    auto r = timed(fn, budget);
    r.id = id;
    r.name = name;
    out.push_back(std::move(r));
  };
  add(1, "formulation equivalence", 2.0, [&] { return formulation_equivalence(ctx); });
  add(2, "first-step closed form", 0.0, [] { return first_step_closed_form(); });
  add(3, "SGD reduction at mu=0", 0.0, [&] { return sgd_reduction(ctx); });
  add(4, "iteration arithmetic", 0.0, [] { return iteration_arithmetic(); });
  add(5, "schedule compliance", 1.0, [] { return schedule_compliance(); });
  add(6, "last-iterate convergence", 10.0, [&] { return last_iterate_convergence(ctx); });
  add(8, "gradient correctness", 5.0, [] { return gradient_correctness(); });
  add(9, "oracle soundness", 5.0, [] { return oracle_soundness(); });
  if (scope == Scope::full) add(10, "MNIST desk-scale sweep", 600.0, [&] { return mnist_desk_scale(ctx); });
  add(11, "sequence probe", 0.0, [] { return sequence_probe_check(); });
  add(7, "output-mode ordering", 0.0, [&] { return output_mode_ordering(ctx); });
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

inline void print_results(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  [" << std::setw(2) << r.id << "] " << r.name << ": " << r.detail
       << '\n';
  }
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  os << passed << "/" << results.size() << " criteria passed\n";
}

inline bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

}  // namespace summ::app
