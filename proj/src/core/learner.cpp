#include "learner.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace forks {

double LossSpec::value(double margin) const noexcept {
  const double gap = std::max(0.0, 1.0 - margin);
  return family == LossFamily::hinge ? gap : gap * gap;
}

double LossSpec::derivative(double margin) const noexcept {
  if (family == LossFamily::hinge) return margin < 1.0 ? -1.0 : 0.0;
  return -2.0 * std::max(0.0, 1.0 - margin);
}

double clip_h(double z, double c) noexcept {
  const double excess = std::max(std::abs(z) - c, 0.0);
  if (z > 0.0) return excess;
  if (z < 0.0) return -excess;
  return 0.0;
}

OnsState OnsState::reset(std::size_t k, double alpha, double sigma_w, double eta_w) {
  const auto n = static_cast<Eigen::Index>(k);
  OnsState s;
  s.w = Eigen::VectorXd::Zero(n);
  s.A_inv = Eigen::MatrixXd::Identity(n, n) / alpha;
  s.alpha = alpha;
  s.sigma_w = sigma_w;
  s.eta_w = eta_w;
  return s;
}

namespace {

void sherman_morrison(Eigen::MatrixXd& a_inv, const Eigen::VectorXd& g, double weight) {
  if (weight == 0.0) return;
  const Eigen::VectorXd ag = a_inv * g;
  const double denom = 1.0 + weight * g.dot(ag);
  if (!(denom > 0.0)) throw NumericError("ons_step: inverse update lost positive-definiteness");
  a_inv.noalias() -= (weight / denom) * ag * ag.transpose();
  const Eigen::MatrixXd t = a_inv.transpose();
  a_inv = 0.5 * (a_inv + t);
}

}  // namespace

void ons_project(OnsState& ons, const Eigen::VectorXd& phi, double clip) {
  if (phi.size() != ons.w.size()) throw InputError("ons_project: feature dimension mismatch");
  const double excess = clip_h(phi.dot(ons.w), clip);
  if (excess == 0.0) return;
  const Eigen::VectorXd a_phi = ons.A_inv * phi;
  const double denom = phi.dot(a_phi);
  if (!(denom > 0.0)) throw NumericError("ons_step: phi^T A^-1 phi is not positive");
  ons.w -= (excess / denom) * a_phi;
}

void ons_descend(OnsState& ons, const Eigen::VectorXd& phi, double g_scale, OnsOrdering ordering) {
  if (phi.size() != ons.w.size()) throw InputError("ons_step: feature dimension mismatch");
  const Eigen::VectorXd g = g_scale * phi;
  const double weight = ons.sigma_w + ons.eta_w;
  if (ordering == OnsOrdering::updated_inverse) sherman_morrison(ons.A_inv, g, weight);
  ons.w -= ons.A_inv * g;
  if (ordering == OnsOrdering::current_inverse) sherman_morrison(ons.A_inv, g, weight);
}

void ons_step(OnsState& ons, const Eigen::VectorXd& phi, double g_scale, double clip,
              OnsOrdering ordering) {
  if (phi.size() != ons.w.size()) throw InputError("ons_step: feature dimension mismatch");
  if (ordering == OnsOrdering::updated_inverse) {
    ons_descend(ons, phi, g_scale, ordering);
    ons_project(ons, phi, clip);
    return;
  }
  // The projection must see the same A^-1 as the descent, so it runs before
  // the inverse update.
  const Eigen::VectorXd g = g_scale * phi;
  ons.w -= ons.A_inv * g;
  ons_project(ons, phi, clip);
  sherman_morrison(ons.A_inv, g, ons.sigma_w + ons.eta_w);
}

double kogd_predict(std::span<const SupportVector> buffer, const KernelConfig& kernel,
                    const SparseVector& x) {
  double f = 0.0;
  for (const auto& sv : buffer) f += sv.coef * eval(kernel, sv.x, x);
  return f;
}

bool kogd_update(std::vector<SupportVector>& buffer, const LossSpec& loss, double eta,
                 const SparseVector& x, int y, double score) {
  const double margin = y * score;
  if (loss.value(margin) <= 0.0) return false;
  buffer.push_back({x, -eta * loss.derivative(margin) * y});
  return true;
}

bool kogd_update(std::vector<SupportVector>& buffer, const KernelConfig& kernel,
                 const LossSpec& loss, double eta, const SparseVector& x, int y) {
  return kogd_update(buffer, loss, eta, x, y, kogd_predict(buffer, kernel, x));
}

void ForksConfig::validate() const {
  kernel.validate();
  if (budget == 0) throw ConfigError("budget must be positive");
  if (sample_size == 0 || sample_size > budget) {
    throw ConfigError("sample size must lie in [1, budget]");
  }
  if (sketch_size < sample_size) throw ConfigError("sketch size must be at least the sample size");
  if (rank == 0 || rank > sketch_size) throw ConfigError("rank must lie in [1, sketch size]");
  if (blocks == 0 || sketch_size % blocks != 0) {
    throw ConfigError("sketch size must be a positive multiple of the block count");
  }
  if (update_cycle == 0) throw ConfigError("update cycle must be positive");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(sigma_w >= 0.0) || !(eta_w >= 0.0)) throw ConfigError("sigma_w and eta_w must be non-negative");
  if (!(kogd_eta > 0.0)) throw ConfigError("KOGD step size must be positive");
  if (!(clip >= 0.0)) throw ConfigError("clip constant must be non-negative");
}

ForksLearner::ForksLearner(ForksConfig config) : config_(std::move(config)) {
  config_.validate();
  buffer_.reserve(config_.budget);
}

std::size_t ForksLearner::anchor_count() const noexcept {
  return sketched_ ? sketched_->sketch.anchors.size() : buffer_.size();
}

void ForksLearner::enter_sketched_phase() {
  std::vector<SparseVector> points;
  points.reserve(buffer_.size());
  for (const auto& sv : buffer_) points.push_back(sv.x);

  Sketched s;
  s.sketch = init_sketches(points, config_.kernel, config_.sketch_size, config_.sample_size,
                           config_.blocks, config_.seed);
  s.svd = init_truncated(s.sketch.phi_pp, config_.rank);
  s.sampled = s.sketch.sampled_anchors();
  s.map = build_map(s.sketch.phi_pm, s.svd, s.sampled, config_.kernel, config_.pinv_tol);
  s.ons = OnsState::reset(config_.rank, config_.alpha, config_.sigma_w, config_.eta_w);
  sketched_ = std::move(s);
  rounds_since_update_ = 0;
}

void ForksLearner::refresh(const SparseVector& x) {
  auto& s = *sketched_;
  const LowRankUpdate update = update_sketches(s.sketch, x);
  tisvd_update(s.svd, update, config_.rank);
  s.map = build_map(s.sketch.phi_pm, s.svd, s.sampled, config_.kernel, config_.pinv_tol);
  s.ons = OnsState::reset(config_.rank, config_.alpha, config_.sigma_w, config_.eta_w);
}

RoundResult ForksLearner::round(const SparseVector& x, int y) {
  RoundResult out;
  if (!sketched_) {
    out.kind = RoundKind::filling;
    out.score = kogd_predict(buffer_, config_.kernel, x);
    out.prediction = sign_label(out.score);
    kogd_update(buffer_, config_.loss, config_.kogd_eta, x, y, out.score);
    if (buffer_.size() == config_.budget) enter_sketched_phase();
    return out;
  }

  out.kind = RoundKind::regular;
  if (++rounds_since_update_ == config_.update_cycle) {
    out.kind = RoundKind::update;
    refresh(x);
    rounds_since_update_ = 0;
  }

  auto& s = *sketched_;
  const Eigen::VectorXd phi = s.map.embed(x);
  const bool lazy = config_.projection == ProjectionPoint::next_example;
  if (lazy) ons_project(s.ons, phi, config_.clip);
  out.score = s.ons.w.dot(phi);
  out.prediction = sign_label(out.score);
  const double g_scale = config_.loss.derivative(y * out.score) * y;
  if (g_scale != 0.0) {
    if (lazy) {
      ons_descend(s.ons, phi, g_scale, config_.ordering);
    } else {
      ons_step(s.ons, phi, g_scale, config_.clip, config_.ordering);
    }
  }
  return out;
}

}  // namespace forks
