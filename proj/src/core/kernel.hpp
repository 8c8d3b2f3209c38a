#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace forks {

/// Sparse feature vector stored as parallel (index, value) arrays with
/// strictly increasing 0-based indices. Absent coordinates are zero.
struct SparseVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const noexcept { return index.size(); }

  /// Builds from a dense array, keeping nonzero coordinates only.
  static SparseVector from_dense(std::span<const double> dense);

  /// Dense copy of length `dim` (indices >= dim are dropped).
  Eigen::VectorXd to_dense(std::size_t dim) const;

  bool operator==(const SparseVector&) const = default;
};

enum class KernelFamily { gaussian };

struct KernelConfig {
  KernelFamily family = KernelFamily::gaussian;
  double bandwidth = 1.0;  // sigma in exp(-|x - x'|^2 / (2 sigma^2))

  /// Throws ConfigError unless bandwidth is finite and positive.
  void validate() const;
};

/// Squared Euclidean distance by merge-join over the sorted indices.
/// Throws InputError on non-finite coordinates.
double squared_distance(const SparseVector& a, const SparseVector& b);

/// kappa(a, b). Symmetric bit-for-bit: eval(a, b) == eval(b, a).
double eval(const KernelConfig& cfg, const SparseVector& a, const SparseVector& b);

/// [kappa(x, anchors[0]), ..., kappa(x, anchors[n-1])].
/// Throws InputError when `anchors` is empty.
Eigen::VectorXd kernel_vector(const KernelConfig& cfg, const SparseVector& x,
                              std::span<const SparseVector> anchors);

/// Gram matrix over `anchors`; each unordered pair is evaluated once so the
/// result is exactly symmetric.
Eigen::MatrixXd gram(const KernelConfig& cfg, std::span<const SparseVector> anchors);

}  // namespace forks
