#include "kernel.hpp"

#include <cmath>

#include "errors.hpp"

namespace forks {

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      out.index.push_back(static_cast<std::uint32_t>(i));
      out.value.push_back(dense[i]);
    }
  }
  return out;
}

Eigen::VectorXd SparseVector::to_dense(std::size_t dim) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < dim) out(index[i]) = value[i];
  }
  return out;
}

void KernelConfig::validate() const {
  if (!(std::isfinite(bandwidth) && bandwidth > 0.0)) {
    throw ConfigError("kernel bandwidth must be finite and positive");
  }
}

namespace {

inline double checked(double v) {
  if (!std::isfinite(v)) throw InputError("non-finite feature value");
  return v;
}

}  // namespace

double squared_distance(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  const std::size_t na = a.index.size();
  const std::size_t nb = b.index.size();
  // Each branch squares a difference that is sign-symmetric in (a, b), and the
  // terms are accumulated in increasing index order, so swapping the arguments
  // yields the same floating-point sequence.
  while (i < na && j < nb) {
    if (a.index[i] == b.index[j]) {
      const double d = checked(a.value[i]) - checked(b.value[j]);
      sum += d * d;
      ++i;
      ++j;
    } else if (a.index[i] < b.index[j]) {
      const double d = checked(a.value[i]);
      sum += d * d;
      ++i;
    } else {
      const double d = checked(b.value[j]);
      sum += d * d;
      ++j;
    }
  }
  for (; i < na; ++i) {
    const double d = checked(a.value[i]);
    sum += d * d;
  }
  for (; j < nb; ++j) {
    const double d = checked(b.value[j]);
    sum += d * d;
  }
  return sum;
}

double eval(const KernelConfig& cfg, const SparseVector& a, const SparseVector& b) {
  const double s = cfg.bandwidth;
  return std::exp(-squared_distance(a, b) / (2.0 * s * s));
}

Eigen::VectorXd kernel_vector(const KernelConfig& cfg, const SparseVector& x,
                              std::span<const SparseVector> anchors) {
  if (anchors.empty()) throw InputError("kernel_vector: empty anchor list");
  Eigen::VectorXd out(static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = eval(cfg, x, anchors[i]);
  }
  return out;
}

Eigen::MatrixXd gram(const KernelConfig& cfg, std::span<const SparseVector> anchors) {
  if (anchors.empty()) throw InputError("gram: empty anchor list");
  const auto n = static_cast<Eigen::Index>(anchors.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = eval(cfg, anchors[i], anchors[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = eval(cfg, anchors[i], anchors[j]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace forks
