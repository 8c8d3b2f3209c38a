#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kernel.hpp"
#include "learner.hpp"

namespace forks {

/// Random Fourier features z(x) = sqrt(2/F) cos(omega^T x + b) with
/// omega ~ N(0, I / sigma^2) and b ~ U[0, 2 pi), followed by plain online
/// gradient descent on w.
class FogdLearner {
 public:
  /// Throws ConfigError for dim == 0, features == 0 or eta <= 0.
  FogdLearner(std::size_t dim, std::size_t features, const KernelConfig& kernel, double eta,
              LossSpec loss, std::uint64_t seed);

  RoundResult round(const SparseVector& x, int y);

  /// Throws InputError if x has a coordinate at or beyond dim.
  Eigen::VectorXd features(const SparseVector& x) const;

  const Eigen::VectorXd& weights() const noexcept { return w_; }
  std::size_t feature_count() const noexcept { return static_cast<std::size_t>(w_.size()); }

 private:
  Eigen::MatrixXd omega_t_;  // F x d; column j holds the frequencies of coordinate j
  Eigen::VectorXd phase_;
  Eigen::VectorXd w_;
  double eta_;
  LossSpec loss_;
};

/// KOGD whose support set stops growing once it holds `budget` points.
class KogdBudgetLearner {
 public:
  KogdBudgetLearner(std::size_t budget, const KernelConfig& kernel, double eta, LossSpec loss);

  RoundResult round(const SparseVector& x, int y);

  const std::vector<SupportVector>& buffer() const noexcept { return buffer_; }

 private:
  std::size_t budget_;
  KernelConfig kernel_;
  double eta_;
  LossSpec loss_;
  std::vector<SupportVector> buffer_;
};

}  // namespace forks
