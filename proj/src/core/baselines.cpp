#include "baselines.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "random.hpp"

namespace forks {

FogdLearner::FogdLearner(std::size_t dim, std::size_t features, const KernelConfig& kernel,
                         double eta, LossSpec loss, std::uint64_t seed)
    : eta_(eta), loss_(loss) {
  kernel.validate();
  if (dim == 0) throw ConfigError("FOGD needs a positive input dimension");
  if (features == 0) throw ConfigError("FOGD needs a positive feature count");
  if (!(eta > 0.0)) throw ConfigError("FOGD step size must be positive");

  const auto f = static_cast<Eigen::Index>(features);
  const auto d = static_cast<Eigen::Index>(dim);
  Rng rng(seed);
  omega_t_.resize(f, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < f; ++i) omega_t_(i, j) = rng.normal() / kernel.bandwidth;
  }
  phase_.resize(f);
  for (Eigen::Index i = 0; i < f; ++i) phase_(i) = 2.0 * std::numbers::pi * rng.uniform();
  w_ = Eigen::VectorXd::Zero(f);
}

Eigen::VectorXd FogdLearner::features(const SparseVector& x) const {
  Eigen::VectorXd proj = phase_;
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto j = static_cast<Eigen::Index>(x.index[n]);
    if (j >= omega_t_.cols()) throw InputError("FOGD: feature index beyond the configured dimension");
    proj.noalias() += x.value[n] * omega_t_.col(j);
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(proj.size()));
  return scale * proj.array().cos().matrix();
}

RoundResult FogdLearner::round(const SparseVector& x, int y) {
  const Eigen::VectorXd z = features(x);
  RoundResult out;
  out.kind = RoundKind::regular;
  out.score = w_.dot(z);
  out.prediction = sign_label(out.score);
  const double slope = loss_.derivative(y * out.score);
  if (slope != 0.0) w_.noalias() -= (eta_ * slope * y) * z;
  return out;
}

KogdBudgetLearner::KogdBudgetLearner(std::size_t budget, const KernelConfig& kernel, double eta,
                                     LossSpec loss)
    : budget_(budget), kernel_(kernel), eta_(eta), loss_(loss) {
  kernel.validate();
  if (budget == 0) throw ConfigError("KOGD budget must be positive");
  if (!(eta > 0.0)) throw ConfigError("KOGD step size must be positive");
  buffer_.reserve(budget);
}

RoundResult KogdBudgetLearner::round(const SparseVector& x, int y) {
  RoundResult out;
  out.kind = RoundKind::filling;
  out.score = kogd_predict(buffer_, kernel_, x);
  out.prediction = sign_label(out.score);
  if (buffer_.size() < budget_) kogd_update(buffer_, loss_, eta_, x, y, out.score);
  return out;
}

}  // namespace forks
