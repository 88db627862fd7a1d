#pragma once

// Fully connected classifier: ELU hidden layers, linear output, softmax
// cross-entropy averaged over the batch. Parameters live in one flat vector
// so the optimizer can treat the network as a point in R^d.

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "summ/io/dataset.hpp"
#include "summ/problems.hpp"
#include "summ/types.hpp"

namespace summ {

inline double elu(double z) { return z >= 0.0 ? z : std::expm1(z); }
inline double elu_prime(double z) { return z >= 0.0 ? 1.0 : std::exp(z); }

struct BatchLossGrad {
  double loss = 0.0;
  Vector grad;
};

class MlpModel {
public:
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVectorMap = Eigen::Map<const Vector>;
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using VectorMap = Eigen::Map<Vector>;

  explicit MlpModel(std::vector<Index> layer_dims) : dims_(std::move(layer_dims)) {
    if (dims_.size() < 2) throw DimensionError("an MLP needs at least input and output layers");
    for (Index d : dims_) {
      if (d < 1) throw DimensionError("layer widths must be >= 1");
    }
    offsets_.push_back(0);
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      offsets_.push_back(offsets_.back() + dims_[l + 1] * dims_[l] + dims_[l + 1]);
    }
  }

  const std::vector<Index>& layer_dims() const { return dims_; }
  std::size_t layers() const { return dims_.size() - 1; }
  Index input_dim() const { return dims_.front(); }
  Index classes() const { return dims_.back(); }
  Index parameter_count() const { return offsets_.back(); }

  /// Layer l weights (out x in, column-major) followed by its bias.
  ConstMatrixMap weights(const Vector& p, std::size_t l) const {
    return ConstMatrixMap(p.data() + offsets_[l], dims_[l + 1], dims_[l]);
  }
  ConstVectorMap bias(const Vector& p, std::size_t l) const {
    return ConstVectorMap(p.data() + offsets_[l] + dims_[l + 1] * dims_[l], dims_[l + 1]);
  }
  MatrixMap weights(Vector& p, std::size_t l) const {
    return MatrixMap(p.data() + offsets_[l], dims_[l + 1], dims_[l]);
  }
  VectorMap bias(Vector& p, std::size_t l) const {
    return VectorMap(p.data() + offsets_[l] + dims_[l + 1] * dims_[l], dims_[l + 1]);
  }

  struct Layer {
    Eigen::MatrixXd W;
    Vector b;
  };

  std::vector<Layer> unflatten(const Vector& p) const {
    check_params(p);
    std::vector<Layer> out;
    for (std::size_t l = 0; l < layers(); ++l) out.push_back({weights(p, l), bias(p, l)});
    return out;
  }

  Vector flatten(const std::vector<Layer>& layers_in) const {
    if (layers_in.size() != layers()) throw DimensionError("layer count mismatch in flatten");
    Vector p(parameter_count());
    for (std::size_t l = 0; l < layers(); ++l) {
      if (layers_in[l].W.rows() != dims_[l + 1] || layers_in[l].W.cols() != dims_[l] ||
          layers_in[l].b.size() != dims_[l + 1]) {
        throw DimensionError("layer " + std::to_string(l) + " has the wrong shape");
      }
      weights(p, l) = layers_in[l].W;
      bias(p, l) = layers_in[l].b;
    }
    return p;
  }

  /// Weights uniform on +-sqrt(6 / (fan_in + fan_out)), biases zero.
  Vector initial_parameters(std::uint64_t seed) const {
    Rng rng(seed);
    Vector p = Vector::Zero(parameter_count());
    for (std::size_t l = 0; l < layers(); ++l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(dims_[l] + dims_[l + 1]));
      auto W = weights(p, l);
      for (Index i = 0; i < W.size(); ++i) W.data()[i] = detail::uniform(rng, -limit, limit);
    }
    return p;
  }

  void check_params(const Vector& p) const {
    detail::require_same_dim(parameter_count(), p.size(), "MLP parameter vector");
  }

private:
  std::vector<Index> dims_;
  std::vector<Index> offsets_;
};

namespace detail {

inline void check_batch(const MlpModel& model, const Vector& params, const Eigen::MatrixXd& inputs,
                        std::span<const int> labels) {
  model.check_params(params);
  require_same_dim(model.input_dim(), inputs.rows(), "batch input rows");
  if (inputs.cols() == 0) throw DimensionError("batch must contain at least one sample");
  require_same_dim(inputs.cols(), static_cast<Index>(labels.size()), "batch labels");
  for (int y : labels) {
    if (y < 0 || y >= model.classes()) throw DomainError("label " + std::to_string(y) + " out of range");
  }
}

// Column-wise log-softmax with max subtraction.
inline Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits;
  for (Index j = 0; j < out.cols(); ++j) {
    auto c = out.col(j);
    const double m = c.maxCoeff();
    c.array() -= m;
    const double lse = std::log(c.array().exp().sum());
    c.array() -= lse;
  }
  return out;
}

}  // namespace detail

/// Output-layer logits for every column of `inputs`.
inline Eigen::MatrixXd logits(const MlpModel& model, const Vector& params, const Eigen::MatrixXd& inputs) {
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < model.layers(); ++l) {
    Eigen::MatrixXd z = model.weights(params, l) * a;
    z.colwise() += model.bias(params, l);
    if (l + 1 < model.layers()) z = z.unaryExpr([](double v) { return elu(v); });
    a = std::move(z);
  }
  return a;
}

inline double forward_loss(const MlpModel& model, const Vector& params, const Eigen::MatrixXd& inputs,
                           std::span<const int> labels) {
  detail::check_batch(model, params, inputs, labels);
  const Eigen::MatrixXd logp = detail::log_softmax(logits(model, params, inputs));
  double total = 0.0;
  for (Index j = 0; j < logp.cols(); ++j) total -= logp(labels[static_cast<std::size_t>(j)], j);
  return total / static_cast<double>(logp.cols());
}

/// Loss and its exact gradient with respect to the flat parameter vector.
inline BatchLossGrad backward_grad(const MlpModel& model, const Vector& params,
                                   const Eigen::MatrixXd& inputs, std::span<const int> labels) {
  detail::check_batch(model, params, inputs, labels);
  const std::size_t L = model.layers();
  const double n = static_cast<double>(inputs.cols());

  // pre[l] = W_l a_{l-1} + b_l; act[l] = input to layer l.
  std::vector<Eigen::MatrixXd> pre(L);
  std::vector<Eigen::MatrixXd> act(L);
  act[0] = inputs;
  for (std::size_t l = 0; l < L; ++l) {
    pre[l] = model.weights(params, l) * act[l];
    pre[l].colwise() += model.bias(params, l);
    if (l + 1 < L) act[l + 1] = pre[l].unaryExpr([](double v) { return elu(v); });
  }

  Eigen::MatrixXd delta = detail::log_softmax(pre[L - 1]);
  double total = 0.0;
  for (Index j = 0; j < delta.cols(); ++j) total -= delta(labels[static_cast<std::size_t>(j)], j);
  delta = delta.array().exp().matrix();  // softmax probabilities
  for (Index j = 0; j < delta.cols(); ++j) delta(labels[static_cast<std::size_t>(j)], j) -= 1.0;
  delta /= n;

  BatchLossGrad out;
  out.loss = total / n;
  out.grad = Vector::Zero(model.parameter_count());
  for (std::size_t l = L; l-- > 0;) {
    model.weights(out.grad, l).noalias() = delta * act[l].transpose();
    model.bias(out.grad, l) = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = model.weights(params, l).transpose() * delta;
      delta = back.cwiseProduct(pre[l - 1].unaryExpr([](double v) { return elu_prime(v); }));
    }
  }
  return out;
}

/// Classification accuracy of `params` over a dataset, evaluated in chunks.
inline double accuracy(const MlpModel& model, const Vector& params, const Dataset& data, Index chunk = 2048) {
  model.check_params(params);
  Index correct = 0;
  std::vector<Index> idx;
  for (Index start = 0; start < data.size(); start += chunk) {
    const Index end = std::min(start + chunk, data.size());
    idx.resize(static_cast<std::size_t>(end - start));
    for (Index i = start; i < end; ++i) idx[static_cast<std::size_t>(i - start)] = i;
    const Batch b = gather(data, idx);
    const Eigen::MatrixXd z = logits(model, params, b.inputs);
    for (Index j = 0; j < z.cols(); ++j) {
      Index arg = 0;
      z.col(j).maxCoeff(&arg);
      if (arg == b.labels[static_cast<std::size_t>(j)]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

/// Mean cross-entropy over a whole dataset, evaluated in chunks.
inline double dataset_loss(const MlpModel& model, const Vector& params, const Dataset& data, Index chunk = 2048) {
  double total = 0.0;
  std::vector<Index> idx;
  for (Index start = 0; start < data.size(); start += chunk) {
    const Index end = std::min(start + chunk, data.size());
    idx.resize(static_cast<std::size_t>(end - start));
    for (Index i = start; i < end; ++i) idx[static_cast<std::size_t>(i - start)] = i;
    const Batch b = gather(data, idx);
    total += forward_loss(model, params, b.inputs, b.labels) * static_cast<double>(end - start);
  }
  return total / static_cast<double>(data.size());
}

/// Mini-batch training presented as a gradient oracle. Samples are drawn
/// from the run's generator; full-objective checks use the whole training
/// set for the loss and a fixed seeded subset for the gradient.
class MlpOracle {
public:
  MlpOracle(MlpModel model, std::shared_ptr<const Dataset> train, Index batch_size, Sampling mode,
            Index eval_subset = 2048, std::uint64_t eval_seed = 0x5eedULL)
      : model_(std::move(model)),
        train_(std::move(train)),
        sampler_(checked_size(train_), mode == Sampling::full ? checked_size(train_) : batch_size, mode) {
    detail::require_same_dim(model_.input_dim(), train_->features(), "dataset features");
    const Index m = std::min(eval_subset, train_->size());
    if (m == train_->size()) {
      eval_idx_.resize(static_cast<std::size_t>(m));
      std::iota(eval_idx_.begin(), eval_idx_.end(), Index{0});
    } else {
      MinibatchStream pick(train_->size(), m, eval_seed, Sampling::epoch_shuffle);
      eval_idx_ = pick.next();
      std::sort(eval_idx_.begin(), eval_idx_.end());
    }
    eval_batch_ = gather(*train_, eval_idx_);
  }

  Index dim() const { return model_.parameter_count(); }
  const MlpModel& model() const { return model_; }
  const Dataset& train() const { return *train_; }
  Index batches_per_epoch() const { return sampler_.batches_per_epoch(); }
  Index eval_subset_size() const { return static_cast<Index>(eval_idx_.size()); }

  Vector initial_point(std::uint64_t seed) const { return model_.initial_parameters(seed); }

  GradientSample sample(const Vector& x, Rng& rng) {
    const auto idx = sampler_.next(rng);
    const Batch b = gather(*train_, idx);
    BatchLossGrad lg = backward_grad(model_, x, b.inputs, b.labels);
    return {lg.loss, std::move(lg.grad)};
  }

  /// Mean loss over the full training set.
  double loss(const Vector& x) const { return dataset_loss(model_, x, *train_); }

  /// Gradient of the mean loss over the fixed evaluation subset.
  Vector full_gradient(const Vector& x) const {
    return backward_grad(model_, x, eval_batch_.inputs, eval_batch_.labels).grad;
  }

private:
  static Index checked_size(const std::shared_ptr<const Dataset>& d) {
    if (!d || d->size() == 0) throw DomainError("training dataset is empty");
    return d->size();
  }

  MlpModel model_;
  std::shared_ptr<const Dataset> train_;
  BatchSampler sampler_;
  std::vector<Index> eval_idx_;
  Batch eval_batch_;
};

inline MlpOracle as_oracle(const MlpModel& model, std::shared_ptr<const Dataset> train, Index batch_size,
                           Sampling mode = Sampling::with_replacement) {
  if (batch_size < 1) throw DomainError("batch size must be >= 1");
  return MlpOracle(model, std::move(train), batch_size, mode);
}

}  // namespace summ
