#include "tisvd.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "errors.hpp"

namespace forks {

namespace {

constexpr double kDropTolerance = 1e-10;
constexpr double kReorthTolerance = 1e-6;
constexpr double kDriftTolerance = 1e-10;
constexpr double kSigmaFloor = 1e-12;

/// Orthonormal basis of range(a) from column-pivoted QR. Columns whose
/// |R_ii| falls below the drop tolerance are discarded, so the basis may be
/// empty.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& a) {
  if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd& r = qr.matrixQR();
  const Eigen::Index diag = std::min(a.rows(), a.cols());
  Eigen::Index keep = 0;
  while (keep < diag && std::abs(r(keep, keep)) > kDropTolerance) ++keep;
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), keep);
  return q;
}

/// Extends `basis` (orthonormal columns) with an orthonormal basis of the
/// part of `delta` it does not span. Returns the coefficients of `delta` in
/// the old basis and writes the new directions P and R = P^T residual.
Eigen::MatrixXd split_against(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& delta,
                              Eigen::MatrixXd& extension, Eigen::MatrixXd& r) {
  Eigen::MatrixXd coeff = basis.transpose() * delta;
  Eigen::MatrixXd residual = delta - basis * coeff;
  // Second projection pass; the correction is folded into the coefficients so
  // that delta = basis * coeff + residual still holds.
  const Eigen::MatrixXd again = basis.transpose() * residual;
  coeff += again;
  residual -= basis * again;

  extension = range_basis(residual);
  if (extension.cols() > 0 && (basis.transpose() * extension).norm() > kReorthTolerance) {
    extension -= basis * (basis.transpose() * extension);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(extension);
    extension = qr.householderQ() * Eigen::MatrixXd::Identity(extension.rows(), extension.cols());
  }
  r = extension.transpose() * residual;
  return coeff;
}

double gram_drift(const Eigen::MatrixXd& q) {
  return (q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols())).norm();
}

/// Restores exact column-orthonormality of U and V without changing
/// U diag(sigma) V^T (beyond rounding): U = Qu Ru, V = Qv Rv, then the small
/// core Ru diag(sigma) Rv^T is re-diagonalized.
void reorthonormalize(SvdState& state) {
  const Eigen::Index k = state.U.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qu(state.U);
  Eigen::HouseholderQR<Eigen::MatrixXd> qv(state.V);
  const Eigen::MatrixXd ru = qu.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rv = qv.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd core = ru * state.sigma.asDiagonal() * rv.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(state.U.rows(), k);
  state.U = (qu.householderQ() * id) * svd.matrixU();
  state.V = (qv.householderQ() * id) * svd.matrixV();
  state.sigma = svd.singularValues();
}

}  // namespace

SvdState init_truncated(const Eigen::MatrixXd& sym, std::size_t k) {
  if (sym.rows() != sym.cols() || sym.rows() == 0) {
    throw InputError("init_truncated: matrix must be square and nonempty");
  }
  if (k == 0 || k > static_cast<std::size_t>(sym.rows())) {
    throw InputError("init_truncated: rank must lie in [1, rows]");
  }
  if (!sym.allFinite()) throw InputError("init_truncated: non-finite entries");
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InputError("init_truncated: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("init_truncated: eigensolver failed");
  const auto n = sym.rows();
  const auto kk = static_cast<Eigen::Index>(k);

  SvdState state;
  state.U.resize(n, kk);
  state.sigma.resize(kk);
  // Eigenvalues come back ascending.
  for (Eigen::Index j = 0; j < kk; ++j) {
    const Eigen::Index src = n - 1 - j;
    state.U.col(j) = eig.eigenvectors().col(src);
    state.sigma(j) = std::max(0.0, eig.eigenvalues()(src));
  }
  state.V = state.U;
  return state;
}

void tisvd_update(SvdState& state, const LowRankUpdate& update, std::size_t k) {
  const Eigen::Index n = state.U.rows();
  if (update.delta1.rows() != n || update.delta2.rows() != n ||
      update.delta1.cols() != update.delta2.cols() || state.V.rows() != n) {
    throw InputError("tisvd_update: dimension mismatch");
  }
  if (k == 0) throw InputError("tisvd_update: rank must be positive");

  const Eigen::Index k0 = state.U.cols();
  Eigen::MatrixXd p;
  Eigen::MatrixXd q;
  Eigen::MatrixXd r1;
  Eigen::MatrixXd r2;
  const Eigen::MatrixXd c1 = split_against(state.U, update.delta1, p, r1);
  const Eigen::MatrixXd c2 = split_against(state.V, update.delta2, q, r2);

  const Eigen::Index rows = k0 + p.cols();
  const Eigen::Index cols = k0 + q.cols();
  Eigen::MatrixXd left(rows, update.delta1.cols());
  Eigen::MatrixXd right(cols, update.delta2.cols());
  left << c1, r1;
  right << c2, r2;
  Eigen::MatrixXd h = left * right.transpose();
  h.topLeftCorner(k0, k0).diagonal() += state.sigma;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), std::min(rows, cols));
  const auto uh = svd.matrixU().leftCols(r);
  const auto vh = svd.matrixV().leftCols(r);

  Eigen::MatrixXd u_next = state.U * uh.topRows(k0);
  if (p.cols() > 0) u_next.noalias() += p * uh.bottomRows(p.cols());
  Eigen::MatrixXd v_next = state.V * vh.topRows(k0);
  if (q.cols() > 0) v_next.noalias() += q * vh.bottomRows(q.cols());

  state.U = std::move(u_next);
  state.V = std::move(v_next);
  state.sigma = svd.singularValues().head(r);

  if (gram_drift(state.U) > kDriftTolerance || gram_drift(state.V) > kDriftTolerance) {
    reorthonormalize(state);
  }
  for (Eigen::Index i = 0; i < state.sigma.size(); ++i) {
    if (state.sigma(i) < kSigmaFloor) state.sigma(i) = 0.0;
  }
}

Eigen::MatrixXd reconstruct(const SvdState& state) {
  return state.U * state.sigma.asDiagonal() * state.V.transpose();
}

}  // namespace forks
