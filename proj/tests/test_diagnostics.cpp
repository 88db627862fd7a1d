#include <cmath>

#include "test_util.hpp"

using namespace summ;

namespace {

TrajectoryRecord norms_run(std::initializer_list<double> norms) {
  TrajectoryRecord t;
  std::int64_t i = 1;
  for (double n : norms) {
    StepRecord s;
    s.t = i++;
    s.loss = n;
    s.full_loss = n;
    s.grad_norm = n;
    t.steps.push_back(s);
  }
  return t;
}

TrajectoryRecord loss_run(const std::vector<double>& losses) {
  TrajectoryRecord t;
  std::int64_t i = 1;
  for (double l : losses) {
    StepRecord s;
    s.t = i++;
    s.loss = l;
    s.full_loss = l;
    t.steps.push_back(s);
  }
  return t;
}

SequenceProbeInput harmonic_example(std::size_t N, double b_exponent) {
  SequenceProbeInput in;
  for (std::size_t n = 1; n <= N; ++n) {
    in.a.push_back(1.0 / double(n));
    in.b.push_back(std::pow(double(n), -b_exponent));
  }
  in.a_tilde = in.a;
  in.p = 2.0;
  in.eps = 1.0;
  return in;
}

}  // namespace

TEST(ConvergenceReport, ConstantNorms) {
  const auto rep = convergence_report({norms_run({2, 2, 2})});
  EXPECT_DOUBLE_EQ(rep.last_sq, 4.0);
  EXPECT_DOUBLE_EQ(rep.min_sq, 4.0);
  EXPECT_DOUBLE_EQ(rep.avg_sq, 4.0);
  EXPECT_EQ(rep.argmin_t, 1);
  EXPECT_TRUE(rep.min_le_avg && rep.min_le_last);
}

TEST(ConvergenceReport, ThreeOneTwo) {
  const auto one = convergence_report({norms_run({3, 1, 2})});
  EXPECT_DOUBLE_EQ(one.min_sq, 1.0);
  EXPECT_EQ(one.argmin_t, 2);
  EXPECT_DOUBLE_EQ(one.last_sq, 4.0);
  EXPECT_DOUBLE_EQ(one.avg_sq, 14.0 / 3.0);

  // second seed 1, 1, 2: mean squared norms 5, 1, 4
  const auto two = convergence_report({norms_run({3, 1, 2}), norms_run({1, 1, 2})});
  EXPECT_DOUBLE_EQ(two.min_sq, 1.0);
  EXPECT_DOUBLE_EQ(two.last_sq, 4.0);
  EXPECT_DOUBLE_EQ(two.avg_sq, 10.0 / 3.0);
  EXPECT_EQ(two.seeds, 2u);
  ASSERT_TRUE(two.terminal_loss.has_value());
  EXPECT_DOUBLE_EQ(*two.terminal_loss, 5.0 / 3.0);
}

TEST(ConvergenceReport, Errors) {
  EXPECT_THROW(convergence_report({}), std::invalid_argument);
  EXPECT_THROW(convergence_report({loss_run({1.0, 2.0})}), std::invalid_argument);
  EXPECT_THROW(convergence_report({norms_run({1, 2}), norms_run({1, 2, 3})}), std::invalid_argument);
}

TEST(AggregateSeeds, MeanAndPopulationStd) {
  const auto c = aggregate_seeds({loss_run({1.0, 5.0}), loss_run({3.0, 5.0})}, Metric::full_loss);
  EXPECT_EQ(c.t, (std::vector<std::int64_t>{1, 2}));
  EXPECT_DOUBLE_EQ(c.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(c.stddev[0], 1.0);
  EXPECT_DOUBLE_EQ(c.mean[1], 5.0);
  EXPECT_DOUBLE_EQ(c.stddev[1], 0.0);
  EXPECT_EQ(c.seeds, 2u);
}

TEST(AggregateSeeds, Errors) {
  EXPECT_THROW(aggregate_seeds({}, Metric::loss), std::invalid_argument);
  EXPECT_THROW(aggregate_seeds({loss_run({1.0}), loss_run({1.0, 2.0})}, Metric::loss), std::invalid_argument);
  EXPECT_THROW(aggregate_seeds({loss_run({1.0, 2.0})}, Metric::grad_norm), std::invalid_argument);
}

TEST(SequenceProbe, WorkedExampleConsistent) {
  const auto rep = sequence_probe(harmonic_example(100000, 0.3));
  EXPECT_EQ(rep.verdict, ProbeVerdict::consistent);
  EXPECT_TRUE(rep.violations.empty());
  EXPECT_TRUE(rep.sum_a_diverges);
  EXPECT_TRUE(rep.sum_a_bp_converges);
  EXPECT_TRUE(rep.increment_bound_holds);
}

TEST(SequenceProbe, ZeroBIsConsistent) {
  auto in = harmonic_example(1000, 0.3);
  std::fill(in.b.begin(), in.b.end(), 0.0);
  EXPECT_EQ(sequence_probe(in).verdict, ProbeVerdict::consistent);
}

TEST(SequenceProbe, SummableANeverConsistent) {
  auto in = harmonic_example(100000, 0.3);
  for (std::size_t n = 1; n <= in.a.size(); ++n) in.a[n - 1] = in.a_tilde[n - 1] = 1.0 / double(n * n);
  const auto rep = sequence_probe(in);
  EXPECT_EQ(rep.verdict, ProbeVerdict::hypothesis_violated);
  EXPECT_FALSE(rep.sum_a_diverges);
}

TEST(SequenceProbe, HarmonicCounterexampleNamed) {
  auto in = harmonic_example(100000, 0.0);  // b constant 1
  in.eps = 0.0;
  const auto rep = sequence_probe(in);
  EXPECT_EQ(rep.verdict, ProbeVerdict::hypothesis_violated);
  ASSERT_FALSE(rep.violations.empty());
  EXPECT_EQ(rep.violations.front(), "sum of a*b^p does not converge");
}

TEST(SequenceProbe, InputErrors) {
  EXPECT_THROW(sequence_probe(harmonic_example(50, 0.3)), std::invalid_argument);
  auto bad = harmonic_example(200, 0.3);
  bad.b.pop_back();
  EXPECT_THROW(sequence_probe(bad), std::invalid_argument);
  auto neg = harmonic_example(200, 0.3);
  neg.a[17] = -1.0;
  try {
    (void)sequence_probe(neg);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("index 18"), std::string::npos);
  }
}

TEST(DescentProbe, ZeroNoiseQuadraticIsBounded) {
  const auto p = make_problem(ProblemKind::noisy_quadratic, 10, 10.0, 0.0, 1);
  std::vector<TrajectoryRecord> runs;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    runs.push_back(run_experiment(p, make_config(0.9, 1.0), make_schedule(0.01, 400, 1.0), 500, LastOutput{}, s,
                                  Formulation::unified)
                       .trajectory);
  }
  const auto rep = descent_probe(runs, p.metadata());
  EXPECT_TRUE(rep.bounded) << rep.summary;
  EXPECT_TRUE(rep.stabilizing) << rep.summary;
  EXPECT_GE(rep.gap_to_f_star, -1e-12);
  EXPECT_EQ(rep.label, "qualitative diagnostic");
}

TEST(DescentProbe, ConstantLoss) {
  const auto rep = descent_probe({loss_run(std::vector<double>(20, 3.0))}, ProblemMetadata{});
  EXPECT_EQ(rep.excursions, 0u);
  EXPECT_TRUE(rep.bounded);
  EXPECT_TRUE(rep.stabilizing);
}

TEST(DescentProbe, GrowingLossIsUnbounded) {
  // eta * L > 2 on a zero-noise quadratic grows the loss geometrically.
  std::vector<double> losses;
  for (int k = 0; k < 20; ++k) losses.push_back(std::pow(1.5, 2 * k));
  const auto rep = descent_probe({loss_run(losses)}, ProblemMetadata{});
  EXPECT_FALSE(rep.bounded);
  EXPECT_FALSE(rep.stabilizing);
  EXPECT_EQ(rep.excursions, 19u);
}

TEST(DescentProbe, NeedsFullLoss) {
  TrajectoryRecord t;
  t.steps.push_back(StepRecord{});
  EXPECT_THROW(descent_probe({t}, ProblemMetadata{}), std::invalid_argument);
  EXPECT_THROW(descent_probe({}, ProblemMetadata{}), std::invalid_argument);
}
