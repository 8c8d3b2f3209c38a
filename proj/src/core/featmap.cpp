#include "featmap.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "errors.hpp"

namespace forks {

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, std::optional<double> tol) {
  if (!m.allFinite()) throw InputError("pinv: non-finite entries");
  if (tol && !(*tol >= 0.0)) throw InputError("pinv: tolerance must be non-negative");
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff =
      tol ? *tol : 1e-10 * s(0) * static_cast<double>(std::max(m.rows(), m.cols()));
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

FeatureMap::FeatureMap(std::vector<SparseVector> sampled_anchors, Eigen::MatrixXd z,
                       KernelConfig kernel)
    : anchors_(std::move(sampled_anchors)), z_(std::move(z)), kernel_(kernel) {
  if (static_cast<std::size_t>(z_.rows()) != anchors_.size()) {
    throw InputError("FeatureMap: Z rows must match the number of sampled anchors");
  }
  if (!z_.allFinite()) throw NumericError("FeatureMap: non-finite projection matrix");
}

Eigen::VectorXd FeatureMap::embed(const SparseVector& x) const {
  if (anchors_.empty()) return Eigen::VectorXd::Zero(z_.cols());
  return z_.transpose() * kernel_vector(kernel_, x, anchors_);
}

FeatureMap build_map(const Eigen::MatrixXd& phi_pm, const SvdState& svd,
                     std::vector<SparseVector> sampled_anchors, const KernelConfig& kernel,
                     std::optional<double> pinv_tol) {
  if (svd.V.rows() != phi_pm.rows()) {
    throw InputError("build_map: V and phi_pm disagree on the sketch size");
  }
  if (static_cast<std::size_t>(phi_pm.cols()) != sampled_anchors.size()) {
    throw InputError("build_map: phi_pm columns must match the sampled anchors");
  }
  if ((svd.sigma.array() < 0.0).any()) throw InputError("build_map: negative singular value");
  const Eigen::VectorXd root = svd.sigma.cwiseSqrt();
  Eigen::MatrixXd z = pinv(phi_pm, pinv_tol) * svd.V * root.asDiagonal();
  return FeatureMap(std::move(sampled_anchors), std::move(z), kernel);
}

}  // namespace forks
