#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kernel.hpp"
#include "tisvd.hpp"

namespace forks {

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below `tol`
/// are treated as zero; the default cutoff is
/// 1e-10 * sigma_max * max(rows, cols).
/// Throws InputError on non-finite entries or negative tol.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, std::optional<double> tol = std::nullopt);

/// Explicit k-dimensional feature map
///   phi(x) = Z^T [kappa(x, a_1), ..., kappa(x, a_sm)]^T
/// over the frozen sampled anchors a_i. Immutable once built.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::vector<SparseVector> sampled_anchors, Eigen::MatrixXd z, KernelConfig kernel);

  Eigen::VectorXd embed(const SparseVector& x) const;

  const std::vector<SparseVector>& sampled_anchors() const noexcept { return anchors_; }
  const Eigen::MatrixXd& z() const noexcept { return z_; }
  const KernelConfig& kernel() const noexcept { return kernel_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(z_.cols()); }

 private:
  std::vector<SparseVector> anchors_;
  Eigen::MatrixXd z_;  // s_m x k
  KernelConfig kernel_;
};

/// Z = pinv(phi_pm) V diag(sqrt(sigma)).
/// Throws InputError on mismatched dimensions or negative sigma entries.
FeatureMap build_map(const Eigen::MatrixXd& phi_pm, const SvdState& svd,
                     std::vector<SparseVector> sampled_anchors, const KernelConfig& kernel,
                     std::optional<double> pinv_tol = std::nullopt);

}  // namespace forks
