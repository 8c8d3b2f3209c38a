#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "sketch.hpp"

namespace forks {

/// Rank-k factorization U diag(sigma) V^T with column-orthonormal U and V and
/// non-negative, non-increasing sigma.
struct SvdState {
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
  Eigen::VectorXd sigma;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(U.rows()); }
};

/// Top-k eigenpairs of a symmetric matrix, negative eigenvalues clamped to
/// zero, U = V = eigenvectors.
/// Throws InputError if `sym` is not square, is asymmetric beyond 1e-8
/// (relative to its largest entry, with an absolute floor of 1e-8), or
/// k is outside [1, rows].
SvdState init_truncated(const Eigen::MatrixXd& sym, std::size_t k);

/// Truncated incremental SVD: replaces the factorization of M by the rank-k
/// factorization of M + delta1 delta2^T, working only with
/// (k + 3)-sized inner problems.
///
/// Steps:
///   1. U_A = (I - U U^T) delta1, V_B = (I - V V^T) delta2
///   2. P, Q: orthonormal bases of range(U_A), range(V_B) from pivoted QR;
///      directions with residual norm below 1e-10 are dropped
///   3. R1 = P^T U_A, R2 = Q^T V_B
///   4. H = [sigma 0; 0 0] + [U^T delta1; R1] [V^T delta2; R2]^T
///   5. rank-k SVD of H
///   6. U' = [U P] Uh_k, V' = [V Q] Vh_k, sigma' = sigma_h,k
/// P (or Q) is orthogonalized a second time against U (V) whenever
/// |U^T P|_F exceeds 1e-6, and U', V' are re-orthonormalized if their
/// Gram matrices drift from the identity.
/// Throws InputError on dimension mismatch.
void tisvd_update(SvdState& state, const LowRankUpdate& update, std::size_t k);

/// U diag(sigma) V^T.
Eigen::MatrixXd reconstruct(const SvdState& state);

}  // namespace forks
