#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kernel.hpp"

namespace forks {

/// Sparse Johnson-Lindenstrauss transform S_p, defined implicitly by hashes.
///
/// The matrix has one row per anchor and `sketch_size` columns split into
/// `blocks` submatrices of equal width. Row i carries, in every block k, a
/// single entry g_k(i) in {-1/sqrt(blocks), +1/sqrt(blocks)} at column
/// h_k(i). Both hashes are counter-based functions of (seed, k, i), so rows
/// for newly arriving anchors are generated on demand and never stored.
struct SjltSpec {
  std::uint64_t seed = 0;
  std::size_t blocks = 1;       // D
  std::size_t sketch_size = 1;  // s_p, multiple of blocks

  std::size_t block_width() const noexcept { return sketch_size / blocks; }
  void validate() const;
};

struct SjltEntry {
  std::size_t column;
  double value;
};

/// The D nonzeros of S_p's row `anchor_index`, ordered by block.
std::vector<SjltEntry> sjlt_row(const SjltSpec& spec, std::size_t anchor_index);

/// sjlt_row as a dense length-s_p vector.
Eigen::VectorXd sjlt_row_dense(const SjltSpec& spec, std::size_t anchor_index);

/// S_p^T v for an S_p with `anchor_count` rows, in O(anchor_count * D).
Eigen::VectorXd apply_sjlt_transpose(const SjltSpec& spec, std::size_t anchor_count,
                                     const Eigen::VectorXd& v);

/// Column-sampling matrix S_m: the identity columns at `indices`.
struct SampleSpec {
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
  std::vector<std::size_t> indices;
};

struct SketchState {
  std::vector<SparseVector> anchors;
  SjltSpec sjlt;
  SampleSpec sample;
  Eigen::MatrixXd phi_pm;  // S_p^T K S_m, s_p x s_m
  Eigen::MatrixXd phi_pp;  // S_p^T K S_p, s_p x s_p
  KernelConfig kernel;

  std::vector<SparseVector> sampled_anchors() const;
};

/// Symmetric rank-3 modification of phi_pp in factored form:
/// delta1 * delta2^T = s psi'^T + psi' s^T + kappa(x, x) s s^T with
/// s the new SJLT row and psi' = S_p^T psi.
struct LowRankUpdate {
  Eigen::MatrixXd delta1;  // [s, psi', s]
  Eigen::MatrixXd delta2;  // [psi', s, kappa s]
};

/// Builds the sketches over the initial anchor buffer.
/// Throws ConfigError when buffer.size() < sample_size, sample_size >
/// sketch_size, or sketch_size is not a multiple of blocks.
SketchState init_sketches(std::span<const SparseVector> buffer, const KernelConfig& kernel,
                          std::size_t sketch_size, std::size_t sample_size, std::size_t blocks,
                          std::uint64_t seed);

/// Appends `x_new` as an anchor and applies the rank-one modifications to
/// both sketches. The sampled column set stays fixed, so phi_pm only gains
/// s (psi restricted to the sampled indices)^T. phi_pp is re-symmetrized
/// afterwards.
LowRankUpdate update_sketches(SketchState& state, const SparseVector& x_new);

struct ProductPreservation {
  double failure_rate = 0.0;  // fraction of trials above 1 / (delta s_p)
  double median_ratio = 0.0;
};

/// Monte-Carlo estimate of the matrix-product-preserving property of SJLT:
/// for Gaussian A (T x 8) and B (8 x T) with T = 64, measures
/// |BA - B S S^T A|_F^2 / (2 |B|_F^2 |A|_F^2) over fresh SJLT draws.
/// Throws ConfigError when trials < 100.
ProductPreservation product_preservation_stat(std::size_t sketch_size, std::size_t blocks,
                                              std::size_t trials, double delta,
                                              std::uint64_t seed);

}  // namespace forks
