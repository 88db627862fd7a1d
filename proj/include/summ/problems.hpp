#pragma once

// Synthetic stochastic objectives. Each noisy gradient is the exact gradient
// plus independent uniform noise on [-r, r] per coordinate, so the oracle is
// unbiased by construction and its second moment is bounded wherever the
// exact gradient is bounded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "summ/types.hpp"

namespace summ {

enum class ProblemKind { noisy_quadratic, noisy_rosenbrock, logistic_synthetic };

inline std::string_view to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::noisy_quadratic: return "noisy_quadratic";
    case ProblemKind::noisy_rosenbrock: return "noisy_rosenbrock";
    case ProblemKind::logistic_synthetic: return "logistic_synthetic";
  }
  return "?";
}

inline ProblemKind parse_problem_kind(std::string_view s) {
  if (s == "noisy_quadratic") return ProblemKind::noisy_quadratic;
  if (s == "noisy_rosenbrock") return ProblemKind::noisy_rosenbrock;
  if (s == "logistic_synthetic") return ProblemKind::logistic_synthetic;
  throw std::invalid_argument("unknown problem kind '" + std::string(s) + "'");
}

/// Ball (Euclidean or max-norm) on which G_sq is a valid second-moment bound.
struct OperatingRegion {
  Vector center;
  double radius = 0.0;
  bool max_norm = false;

  bool contains(const Vector& x) const {
    const Vector d = x - center;
    const double n = max_norm ? d.cwiseAbs().maxCoeff() : d.norm();
    return n <= radius;
  }
};

struct ProblemMetadata {
  double L = 0.0;       ///< gradient Lipschitz constant (exact or a regional bound)
  double G_sq = 0.0;    ///< bound on E||g||^2 over the operating region
  double f_star = 0.0;  ///< lower bound on f (exact where known)
  OperatingRegion region;
};

struct GradientSample {
  double loss = 0.0;
  Vector grad;
};

/// f(x) = 1/2 x^T diag(a) x - b^T x.
class QuadraticObjective {
public:
  QuadraticObjective(Vector eigenvalues, Vector b) : a_(std::move(eigenvalues)), b_(std::move(b)) {
    detail::require_same_dim(a_.size(), b_.size(), "quadratic linear term");
    if (a_.size() == 0) throw DimensionError("quadratic needs dimension >= 1");
    if (!(a_.array() > 0.0).all()) throw DomainError("quadratic eigenvalues must be positive");
  }

  Index dim() const { return a_.size(); }
  double value(const Vector& x) const { return 0.5 * x.dot(a_.cwiseProduct(x)) - b_.dot(x); }
  Vector gradient(const Vector& x) const { return a_.cwiseProduct(x) - b_; }
  Vector minimizer() const { return b_.cwiseQuotient(a_); }
  const Vector& eigenvalues() const { return a_; }
  const Vector& linear_term() const { return b_; }

private:
  Vector a_;
  Vector b_;
};

/// Chained Rosenbrock: sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2, minimum 0 at all-ones.
class RosenbrockObjective {
public:
  explicit RosenbrockObjective(Index dim) : dim_(dim) {
    if (dim < 2) throw DimensionError("rosenbrock needs dimension >= 2");
  }

  Index dim() const { return dim_; }

  double value(const Vector& x) const {
    double f = 0.0;
    for (Index i = 0; i + 1 < dim_; ++i) {
      const double r = x[i + 1] - x[i] * x[i];
      const double s = 1.0 - x[i];
      f += 100.0 * r * r + s * s;
    }
    return f;
  }

  Vector gradient(const Vector& x) const {
    Vector g = Vector::Zero(dim_);
    for (Index i = 0; i + 1 < dim_; ++i) {
      const double r = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * r - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * r;
    }
    return g;
  }

private:
  Index dim_;
};

/// Mean logistic loss on a fixed synthetic sample plus a small ridge term.
class LogisticObjective {
public:
  LogisticObjective(Eigen::MatrixXd features, Vector labels, double ridge)
      : z_(std::move(features)), y_(std::move(labels)), ridge_(ridge) {
    detail::require_same_dim(z_.rows(), y_.size(), "logistic labels");
  }

  Index dim() const { return z_.cols(); }
  Index samples() const { return z_.rows(); }
  const Eigen::MatrixXd& features() const { return z_; }
  double ridge() const { return ridge_; }

  double value(const Vector& w) const {
    const Vector margin = y_.cwiseProduct(z_ * w);
    double f = 0.0;
    for (Index i = 0; i < margin.size(); ++i) f += softplus(-margin[i]);
    return f / static_cast<double>(samples()) + 0.5 * ridge_ * w.squaredNorm();
  }

  Vector gradient(const Vector& w) const {
    const Vector margin = y_.cwiseProduct(z_ * w);
    Vector coeff(margin.size());
    for (Index i = 0; i < margin.size(); ++i) coeff[i] = -y_[i] * sigmoid(-margin[i]);
    return z_.transpose() * coeff / static_cast<double>(samples()) + ridge_ * w;
  }

private:
  static double softplus(double s) { return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }
  static double sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
  }

  Eigen::MatrixXd z_;
  Vector y_;
  double ridge_;
};

class StochasticProblem {
public:
  using Objective = std::variant<QuadraticObjective, RosenbrockObjective, LogisticObjective>;

  StochasticProblem(ProblemKind kind, Objective objective, double noise_radius,
                    ProblemMetadata metadata, Vector initial_point)
      : kind_(kind),
        objective_(std::move(objective)),
        noise_radius_(noise_radius),
        metadata_(std::move(metadata)),
        x1_(std::move(initial_point)) {
    if (!(noise_radius_ >= 0.0) || !std::isfinite(noise_radius_)) {
      throw DomainError("noise radius must be finite and >= 0");
    }
  }

  ProblemKind kind() const { return kind_; }
  Index dim() const {
    return std::visit([](const auto& o) { return o.dim(); }, objective_);
  }
  double noise_radius() const { return noise_radius_; }
  const ProblemMetadata& metadata() const { return metadata_; }
  const Objective& objective() const { return objective_; }

  /// Synthetic problems start from a fixed point; the seed is accepted for
  /// interface parity with randomly initialised models.
  Vector initial_point(std::uint64_t /*seed*/ = 0) const { return x1_; }

  double loss(const Vector& x) const {
    detail::require_same_dim(dim(), x.size(), "loss argument");
    return std::visit([&](const auto& o) { return o.value(x); }, objective_);
  }

  Vector full_gradient(const Vector& x) const {
    detail::require_same_dim(dim(), x.size(), "gradient argument");
    return std::visit([&](const auto& o) { return o.gradient(x); }, objective_);
  }

  /// Exact gradient plus one draw of uniform noise; consumes exactly dim()
  /// generator outputs when noise_radius > 0 and none otherwise.
  Vector sample_gradient(const Vector& x, Rng& rng) const {
    Vector g = full_gradient(x);
    if (noise_radius_ > 0.0) {
      for (Index i = 0; i < g.size(); ++i) g[i] += detail::uniform(rng, -noise_radius_, noise_radius_);
    }
    return g;
  }

  GradientSample sample(const Vector& x, Rng& rng) const { return {loss(x), sample_gradient(x, rng)}; }

  /// Monte Carlo estimate of E||g||^2 at x.
  double estimate_second_moment(const Vector& x, std::int64_t n, Rng& rng) const {
    if (n < 1) throw DomainError("second-moment estimate needs n >= 1");
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) acc += sample_gradient(x, rng).squaredNorm();
    return acc / static_cast<double>(n);
  }

  bool in_operating_region(const Vector& x) const { return metadata_.region.contains(x); }

private:
  ProblemKind kind_;
  Objective objective_;
  double noise_radius_;
  ProblemMetadata metadata_;
  Vector x1_;
};

/// Quadratic with explicit spectrum and linear term. The operating region is
/// the Euclidean ball around the minimiser of radius 2 * ||x1 - x*|| + 1 with
/// x1 = 0, on which ||grad f|| <= L * radius.
inline StochasticProblem make_quadratic(Vector eigenvalues, Vector b, double noise_radius) {
  QuadraticObjective q(std::move(eigenvalues), std::move(b));
  const Index d = q.dim();
  const Vector x_star = q.minimizer();
  ProblemMetadata meta;
  meta.L = q.eigenvalues().maxCoeff();
  meta.f_star = q.value(x_star);
  meta.region = OperatingRegion{x_star, 2.0 * x_star.norm() + 1.0, false};
  const double grad_bound = meta.L * meta.region.radius;
  meta.G_sq = grad_bound * grad_bound + static_cast<double>(d) * noise_radius * noise_radius / 3.0;
  return StochasticProblem(ProblemKind::noisy_quadratic, std::move(q), noise_radius, std::move(meta),
                           Vector::Zero(d));
}

/// Builds one of the synthetic test beds.
///
/// noisy_quadratic: diagonal spectrum log-spaced over [1, condition_number],
/// linear term uniform on [-1, 1]^dim; L = condition_number (dim >= 2) and
/// f* = f(A^{-1} b) are exact.
///
/// noisy_rosenbrock: chained Rosenbrock started at (-1.2, 1, -1.2, ...).
/// Region is the max-norm box of half-width 2; L and G_sq are Gershgorin and
/// per-coordinate bounds over that box. condition_number is unused.
///
/// logistic_synthetic: 256 samples with features uniform on [-1, 1]^dim and
/// labels from a random separator with 10% flips, ridge 1e-3. Region is the
/// Euclidean ball of radius 10 around the origin; f* = 0 is a lower bound.
inline StochasticProblem make_problem(ProblemKind kind, Index dim, double condition_number,
                                      double noise_radius, std::uint64_t seed) {
  if (dim < 1) throw DimensionError("problem dimension must be >= 1");
  if (!(condition_number >= 1.0) || !std::isfinite(condition_number)) {
    throw DomainError("condition number must be >= 1");
  }
  if (!(noise_radius >= 0.0) || !std::isfinite(noise_radius)) {
    throw DomainError("noise radius must be finite and >= 0");
  }
  Rng rng(seed);
  const double d = static_cast<double>(dim);
  const double noise_sq = d * noise_radius * noise_radius / 3.0;

  switch (kind) {
    case ProblemKind::noisy_quadratic: {
      Vector a(dim);
      for (Index i = 0; i < dim; ++i) {
        a[i] = dim == 1 ? 1.0 : std::pow(condition_number, static_cast<double>(i) / (d - 1.0));
      }
      if (dim > 1) a[dim - 1] = condition_number;
      Vector b(dim);
      for (Index i = 0; i < dim; ++i) b[i] = detail::uniform(rng, -1.0, 1.0);
      return make_quadratic(std::move(a), std::move(b), noise_radius);
    }
    case ProblemKind::noisy_rosenbrock: {
      RosenbrockObjective r(dim);
      constexpr double B = 2.0;
      ProblemMetadata meta;
      meta.L = 1200.0 * B * B + 400.0 * B + 202.0 + 800.0 * B;
      const double comp = 400.0 * B * (B + B * B) + 2.0 * (1.0 + B) + 200.0 * (B + B * B);
      meta.G_sq = d * comp * comp + noise_sq;
      meta.f_star = 0.0;
      meta.region = OperatingRegion{Vector::Zero(dim), B, true};
      Vector x1(dim);
      for (Index i = 0; i < dim; ++i) x1[i] = (i % 2 == 0) ? -1.2 : 1.0;
      return StochasticProblem(kind, std::move(r), noise_radius, std::move(meta), std::move(x1));
    }
    case ProblemKind::logistic_synthetic: {
      constexpr Index n = 256;
      constexpr double ridge = 1e-3;
      constexpr double R = 10.0;
      Eigen::MatrixXd z(n, dim);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim; ++j) z(i, j) = detail::uniform(rng, -1.0, 1.0);
      Vector w_true(dim);
      for (Index j = 0; j < dim; ++j) w_true[j] = detail::uniform(rng, -1.0, 1.0);
      Vector y(n);
      for (Index i = 0; i < n; ++i) {
        const double s = z.row(i).dot(w_true) >= 0.0 ? 1.0 : -1.0;
        y[i] = detail::uniform(rng, 0.0, 1.0) < 0.1 ? -s : s;
      }
      const double max_row = z.rowwise().norm().maxCoeff();
      ProblemMetadata meta;
      meta.L = z.rowwise().squaredNorm().sum() / (4.0 * static_cast<double>(n)) + ridge;
      const double grad_bound = max_row + ridge * R;
      meta.G_sq = grad_bound * grad_bound + noise_sq;
      meta.f_star = 0.0;
      meta.region = OperatingRegion{Vector::Zero(dim), R, false};
      LogisticObjective obj(std::move(z), std::move(y), ridge);
      return StochasticProblem(kind, std::move(obj), noise_radius, std::move(meta), Vector::Zero(dim));
    }
  }
  throw std::invalid_argument("unknown problem kind");
}

}  // namespace summ
