#include <cmath>
#include <numeric>

#include "test_util.hpp"

using namespace summ;

namespace {

Eigen::MatrixXd random_inputs(Index d, Index n, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Eigen::MatrixXd x(d, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < d; ++i) x(i, j) = detail::uniform(rng, lo, hi);
  return x;
}

Vector random_params(const MlpModel& m, Rng& rng, double scale = 1.0) {
  Vector p(m.parameter_count());
  for (Index i = 0; i < p.size(); ++i) p[i] = detail::uniform(rng, -scale, scale);
  return p;
}

Vector central_differences(const MlpModel& m, const Vector& params, const Eigen::MatrixXd& x,
                           const std::vector<int>& y) {
  Vector fd(params.size());
  Vector p = params;
  for (Index i = 0; i < params.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(params[i]));
    p[i] = params[i] + h;
    const double up = forward_loss(m, p, x, y);
    p[i] = params[i] - h;
    const double down = forward_loss(m, p, x, y);
    p[i] = params[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return fd;
}

std::shared_ptr<const Dataset> toy_dataset(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  auto data = std::make_shared<Dataset>();
  data->inputs.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) data->inputs(i, j) = detail::uniform(rng, 0.0, 1.0);
  for (Index i = 0; i < n; ++i) data->labels.push_back(static_cast<int>(detail::uniform_index(rng, 10)));
  data->validate();
  return data;
}

}  // namespace

TEST(Elu, Examples) {
  EXPECT_EQ(elu(0.0), 0.0);
  EXPECT_EQ(elu_prime(0.0), 1.0);
  EXPECT_EQ(elu(2.0), 2.0);
  EXPECT_NEAR(elu(-1.0), -0.632121, 1e-6);
  EXPECT_DOUBLE_EQ(elu(-1.0), std::exp(-1.0) - 1.0);
  EXPECT_DOUBLE_EQ(elu_prime(-2.0), std::exp(-2.0));
  EXPECT_EQ(elu_prime(3.0), 1.0);
}

TEST(MlpModel, LayoutAndRoundTrip) {
  const MlpModel m({784, 128, 10});
  EXPECT_EQ(m.parameter_count(), 784 * 128 + 128 + 128 * 10 + 10);
  Rng rng(1);
  const Vector p = random_params(m, rng);
  EXPECT_EQ(m.flatten(m.unflatten(p)), p);
  EXPECT_THROW(MlpModel({5}), DimensionError);
  EXPECT_THROW(m.unflatten(Vector::Zero(3)), DimensionError);
}

TEST(MlpModel, GlorotInitialisation) {
  const MlpModel m({30, 20, 10});
  const Vector p = m.initial_parameters(7);
  EXPECT_EQ(p, m.initial_parameters(7));
  EXPECT_NE(p, m.initial_parameters(8));
  const auto layers = m.unflatten(p);
  EXPECT_LE(layers[0].W.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 50.0));
  EXPECT_LE(layers[1].W.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 30.0));
  EXPECT_EQ(layers[0].b, Vector::Zero(20));
  EXPECT_EQ(layers[1].b, Vector::Zero(10));
}

TEST(ForwardLoss, ZeroWeightsUniform) {
  const MlpModel m({6, 4, 10});
  Rng rng(2);
  const auto x = random_inputs(6, 5, rng);
  EXPECT_NEAR(forward_loss(m, Vector::Zero(m.parameter_count()), x, std::vector<int>{0, 1, 2, 3, 9}),
              std::log(10.0), 1e-12);
  const Eigen::MatrixXd probs = logits(m, Vector::Zero(m.parameter_count()), x).array().exp();
  EXPECT_LE((probs.array() - 1.0).abs().maxCoeff(), 0.0);
}

TEST(ForwardLoss, ConfidentLogitGivesNearZeroLoss) {
  const MlpModel m({2, 10});
  Vector p = Vector::Zero(m.parameter_count());
  m.bias(p, 0)[4] = 30.0;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  EXPECT_LT(forward_loss(m, p, x, std::vector<int>{4}), 1e-9);
}

TEST(ForwardLoss, DuplicationInvariant) {
  const MlpModel m({5, 4, 3});
  Rng rng(3);
  const Vector p = random_params(m, rng);
  const auto x = random_inputs(5, 1, rng);
  Eigen::MatrixXd xx(5, 2);
  xx << x, x;
  const std::vector<int> y{2}, yy{2, 2};
  EXPECT_NEAR(forward_loss(m, p, x, y), forward_loss(m, p, xx, yy), 1e-15);
  const auto g1 = backward_grad(m, p, x, y), g2 = backward_grad(m, p, xx, yy);
  EXPECT_LE((g1.grad - g2.grad).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(g1.loss, g2.loss, 1e-15);
}

TEST(ForwardLoss, StableForHugeLogits) {
  const MlpModel m({3, 10});
  Vector p = Vector::Zero(m.parameter_count());
  for (int k = 0; k < 10; ++k) m.bias(p, 0)[k] = (k % 2 ? 1.0 : -1.0) * 1000.0;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  const double loss = forward_loss(m, p, x, std::vector<int>{0, 1});
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_NEAR(loss, 0.5 * (2000.0 + std::log(5.0)) + 0.5 * std::log(5.0), 1e-9);
  EXPECT_TRUE(backward_grad(m, p, x, std::vector<int>{0, 1}).grad.allFinite());
}

TEST(ForwardLoss, InputChecks) {
  const MlpModel m({3, 2, 4});
  const Vector p = Vector::Zero(m.parameter_count());
  EXPECT_THROW(forward_loss(m, p, Eigen::MatrixXd::Zero(2, 1), std::vector<int>{0}), DimensionError);
  EXPECT_THROW(forward_loss(m, p, Eigen::MatrixXd::Zero(3, 2), std::vector<int>{0}), DimensionError);
  EXPECT_THROW(forward_loss(m, p, Eigen::MatrixXd::Zero(3, 1), std::vector<int>{4}), DomainError);
  EXPECT_THROW(forward_loss(m, p, Eigen::MatrixXd::Zero(3, 1), std::vector<int>{-1}), DomainError);
  EXPECT_THROW(forward_loss(m, Vector::Zero(2), Eigen::MatrixXd::Zero(3, 1), std::vector<int>{0}), DimensionError);
}

TEST(BackwardGrad, TwentyParameterFiniteDifferences) {
  const MlpModel m({3, 3, 2});  // 9 + 3 + 6 + 2 = 20 parameters
  ASSERT_EQ(m.parameter_count(), 20);
  Rng rng(4);
  for (int point = 0; point < 10; ++point) {
    const Vector p = random_params(m, rng, 1.5);
    const auto x = random_inputs(3, 3, rng, -1.0, 1.0);
    const std::vector<int> y{0, 1, 1};
    const auto bg = backward_grad(m, p, x, y);
    EXPECT_NEAR(bg.loss, forward_loss(m, p, x, y), 1e-14);
    const Vector fd = central_differences(m, p, x, y);
    EXPECT_LE((fd - bg.grad).norm() / std::max(fd.norm(), bg.grad.norm()), 1e-5) << "point " << point;
  }
}

TEST(BackwardGrad, DeeperModelFiniteDifferences) {
  const MlpModel m({7, 6, 5, 4});
  Rng rng(5);
  const Vector p = random_params(m, rng, 0.8);
  const auto x = random_inputs(7, 4, rng, -1.0, 1.0);
  const std::vector<int> y{3, 0, 2, 1};
  const Vector fd = central_differences(m, p, x, y);
  const Vector g = backward_grad(m, p, x, y).grad;
  EXPECT_LE((fd - g).norm() / std::max(fd.norm(), g.norm()), 1e-6);
}

TEST(BackwardGrad, ZeroInputs) {
  const MlpModel m({4, 3, 5});
  Rng rng(6);
  const Vector p = random_params(m, rng);
  const auto bg = backward_grad(m, p, Eigen::MatrixXd::Zero(4, 2), std::vector<int>{1, 3});
  EXPECT_EQ(m.weights(bg.grad, 0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(m.bias(bg.grad, 0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(m.bias(bg.grad, 1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MlpOracle, FullModeIsDeterministicFullGradient) {
  const auto data = toy_dataset(40, 6, 1);
  const MlpModel m({6, 5, 10});
  auto oracle = as_oracle(m, data, 40, Sampling::full);
  const Vector x = m.initial_parameters(1);
  Rng rng(0);
  const auto s = oracle.sample(x, rng);
  const Batch all = gather(*data, [&] {
    std::vector<Index> idx(40);
    std::iota(idx.begin(), idx.end(), Index{0});
    return idx;
  }());
  const auto exact = backward_grad(m, x, all.inputs, all.labels);
  EXPECT_LE((s.grad - exact.grad).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((oracle.full_gradient(x) - exact.grad).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(oracle.loss(x), exact.loss, 1e-13);
}

TEST(MlpOracle, OneSampleDrawsAreUnbiased) {
  const auto data = toy_dataset(30, 4, 2);
  const MlpModel m({4, 3, 10});
  auto oracle = as_oracle(m, data, 1, Sampling::with_replacement);
  Rng prng(3);
  const Vector x = random_params(m, prng, 0.5);
  const Vector full = oracle.full_gradient(x);
  const int n = 10000;
  Vector sum = Vector::Zero(x.size()), sum_sq = Vector::Zero(x.size());
  Rng rng(17);
  for (int k = 0; k < n; ++k) {
    const Vector g = oracle.sample(x, rng).grad;
    sum += g;
    sum_sq += g.cwiseAbs2();
  }
  for (Index i = 0; i < x.size(); ++i) {
    const double mean = sum[i] / n;
    const double sd = std::sqrt(std::max(sum_sq[i] / n - mean * mean, 0.0));
    EXPECT_LE(std::abs(mean - full[i]), 4.0 * sd / std::sqrt(double(n)) + 1e-12) << "parameter " << i;
  }
}

TEST(MlpOracle, SeedsFixBatchSequences) {
  const auto data = toy_dataset(50, 3, 3);
  const MlpModel m({3, 10});
  auto a = as_oracle(m, data, 8);
  auto b = as_oracle(m, data, 8);
  const Vector x = m.initial_parameters(0);
  Rng ra(5), rb(5);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.sample(x, ra).grad, b.sample(x, rb).grad);
}

TEST(MlpOracle, EvalSubsetAndErrors) {
  const auto data = toy_dataset(3000, 2, 4);
  const MlpModel m({2, 10});
  const auto o = as_oracle(m, data, 16);
  EXPECT_EQ(o.eval_subset_size(), 2048);
  EXPECT_EQ(o.batches_per_epoch(), 188);
  EXPECT_THROW(as_oracle(m, data, 0), DomainError);
  EXPECT_THROW(as_oracle(m, std::make_shared<const Dataset>(), 1), DomainError);
  EXPECT_THROW(as_oracle(MlpModel({3, 10}), data, 4), DimensionError);
}

TEST(Accuracy, CountsArgmax) {
  auto data = std::make_shared<Dataset>();
  data->inputs = RowMatrix::Zero(4, 2);
  data->inputs(0, 0) = 1.0;
  data->inputs(1, 1) = 1.0;
  data->inputs(2, 0) = 1.0;
  data->inputs(3, 1) = 1.0;
  data->labels = {0, 1, 1, 1};
  const MlpModel m({2, 10});
  Vector p = Vector::Zero(m.parameter_count());
  m.weights(p, 0)(0, 0) = 1.0;  // feature 0 -> class 0
  m.weights(p, 0)(1, 1) = 1.0;  // feature 1 -> class 1
  EXPECT_DOUBLE_EQ(accuracy(m, p, *data), 0.75);
}
