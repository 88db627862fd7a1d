#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "summ/types.hpp"

namespace summ {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n samples as rows of `inputs` (values in [0, 1]) with integer labels.
struct Dataset {
  RowMatrix inputs;
  std::vector<int> labels;
  int classes = 10;

  Index size() const { return inputs.rows(); }
  Index features() const { return inputs.cols(); }

  void validate() const {
    if (static_cast<std::size_t>(inputs.rows()) != labels.size()) {
      throw DimensionError("dataset has " + std::to_string(inputs.rows()) + " inputs but " +
                           std::to_string(labels.size()) + " labels");
    }
    for (int y : labels) {
      if (y < 0 || y >= classes) throw DomainError("label " + std::to_string(y) + " out of range");
    }
    if (inputs.size() > 0 && (inputs.minCoeff() < 0.0 || inputs.maxCoeff() > 1.0)) {
      throw DomainError("dataset inputs must lie in [0, 1]");
    }
  }
};

/// Gathered mini-batch: one sample per column.
struct Batch {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
};

inline Batch gather(const Dataset& data, std::span<const Index> indices) {
  Batch b;
  b.inputs.resize(data.features(), static_cast<Index>(indices.size()));
  b.labels.resize(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const Index i = indices[j];
    b.inputs.col(static_cast<Index>(j)) = data.inputs.row(i).transpose();
    b.labels[j] = data.labels[static_cast<std::size_t>(i)];
  }
  return b;
}

enum class Sampling {
  with_replacement,  ///< independent uniform draws; exactly unbiased
  epoch_shuffle,     ///< seeded permutation per epoch, last short batch kept
  full,              ///< the whole dataset every time (deterministic)
};

inline std::string_view to_string(Sampling s) {
  switch (s) {
    case Sampling::with_replacement: return "with_replacement";
    case Sampling::epoch_shuffle: return "epoch_shuffle";
    case Sampling::full: return "full";
  }
  return "?";
}

inline Sampling parse_sampling(std::string_view s) {
  if (s == "with_replacement") return Sampling::with_replacement;
  if (s == "epoch_shuffle") return Sampling::epoch_shuffle;
  if (s == "full") return Sampling::full;
  throw std::invalid_argument("unknown sampling mode '" + std::string(s) + "'");
}

/// Produces index batches over [0, n). The generator is supplied per call so
/// the caller decides which stream the draws belong to.
class BatchSampler {
public:
  BatchSampler(Index n, Index batch, Sampling mode) : n_(n), batch_(batch), mode_(mode) {
    if (n < 1) throw DomainError("cannot sample batches from an empty dataset");
    if (batch < 1 || batch > n) {
      throw DomainError("batch size " + std::to_string(batch) + " must lie in [1, " + std::to_string(n) + "]");
    }
  }

  Index batches_per_epoch() const {
    if (mode_ == Sampling::full) return 1;
    return (n_ + batch_ - 1) / batch_;
  }

  std::vector<Index> next(Rng& rng) {
    std::vector<Index> out;
    switch (mode_) {
      case Sampling::full:
        out.resize(static_cast<std::size_t>(n_));
        std::iota(out.begin(), out.end(), Index{0});
        break;
      case Sampling::with_replacement:
        out.resize(static_cast<std::size_t>(batch_));
        for (auto& i : out) i = static_cast<Index>(detail::uniform_index(rng, static_cast<std::uint64_t>(n_)));
        break;
      case Sampling::epoch_shuffle: {
        if (cursor_ >= n_) {
          reshuffle(rng);
        }
        const Index end = std::min(cursor_ + batch_, n_);
        out.assign(perm_.begin() + cursor_, perm_.begin() + end);
        cursor_ = end;
        break;
      }
    }
    return out;
  }

private:
  void reshuffle(Rng& rng) {
    perm_.resize(static_cast<std::size_t>(n_));
    std::iota(perm_.begin(), perm_.end(), Index{0});
    for (Index i = n_ - 1; i > 0; --i) {
      const auto j = static_cast<Index>(detail::uniform_index(rng, static_cast<std::uint64_t>(i + 1)));
      std::swap(perm_[static_cast<std::size_t>(i)], perm_[static_cast<std::size_t>(j)]);
    }
    cursor_ = 0;
  }

  Index n_;
  Index batch_;
  Sampling mode_;
  std::vector<Index> perm_;
  Index cursor_ = std::numeric_limits<Index>::max();
};

/// Self-seeded batch iterator over a dataset of n samples.
class MinibatchStream {
public:
  MinibatchStream(Index n, Index batch, std::uint64_t seed, Sampling mode)
      : sampler_(n, batch, mode), rng_(seed) {}

  std::vector<Index> next() { return sampler_.next(rng_); }
  Index batches_per_epoch() const { return sampler_.batches_per_epoch(); }

private:
  BatchSampler sampler_;
  Rng rng_;
};

inline MinibatchStream minibatch_stream(const Dataset& data, Index batch, std::uint64_t seed, Sampling mode) {
  return MinibatchStream(data.size(), batch, seed, mode);
}

}  // namespace summ
