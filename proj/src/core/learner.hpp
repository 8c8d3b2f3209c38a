#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "featmap.hpp"
#include "kernel.hpp"
#include "sketch.hpp"
#include "tisvd.hpp"

namespace forks {

enum class LossFamily { hinge, squared_hinge };

/// Margin-based classification loss; margin m = y * raw score.
struct LossSpec {
  LossFamily family = LossFamily::hinge;

  double value(double margin) const noexcept;
  /// d loss / d margin.
  double derivative(double margin) const noexcept;
};

/// Soft clip sign(z) * max(|z| - c, 0).
double clip_h(double z, double c) noexcept;

/// Predicted label; ties go to +1.
inline int sign_label(double score) noexcept { return score >= 0.0 ? 1 : -1; }

/// Which inverse the Newton step and projection use: the one from before
/// this round's rank-one update or the one that already includes g g^T.
enum class OnsOrdering { current_inverse, updated_inverse };

struct OnsState {
  Eigen::VectorXd w;
  Eigen::MatrixXd A_inv;
  double alpha = 0.01;
  double sigma_w = 0.5;
  double eta_w = 0.0;

  /// w = 0, A_inv = I / alpha.
  static OnsState reset(std::size_t k, double alpha, double sigma_w, double eta_w);
};

/// One Online Newton Step with gradient g = g_scale * phi:
///   v = w - A^-1 g
///   w = v - clip_h(phi^T v, clip) / (phi^T A^-1 phi) * A^-1 phi
///   A^-1 <- (A + (sigma_w + eta_w) g g^T)^-1   (Sherman-Morrison, O(k^2))
/// `ordering` selects whether the first two lines see A^-1 before or after
/// the rank-one update. The projection is skipped when clip_h(...) is zero.
/// Throws NumericError if phi^T A^-1 phi <= 0 while a projection is needed,
/// or if the Sherman-Morrison denominator is not positive.
void ons_step(OnsState& ons, const Eigen::VectorXd& phi, double g_scale, double clip,
              OnsOrdering ordering = OnsOrdering::updated_inverse);

/// The two halves of ons_step. ons_descend: v = w - A^-1 g plus the inverse
/// update. ons_project: w = v - clip_h(phi^T v, clip) / (phi^T A^-1 phi) A^-1 phi.
void ons_descend(OnsState& ons, const Eigen::VectorXd& phi, double g_scale, OnsOrdering ordering);
void ons_project(OnsState& ons, const Eigen::VectorXd& phi, double clip);

/// Which example's features the projection clips against: the one the
/// gradient came from, or the next one, just before it is predicted.
enum class ProjectionPoint { current_example, next_example };

struct SupportVector {
  SparseVector x;
  double coef = 0.0;
};

/// sum_i coef_i kappa(x_i, x); zero for an empty buffer.
double kogd_predict(std::span<const SupportVector> buffer, const KernelConfig& kernel,
                    const SparseVector& x);

/// Functional gradient step with a precomputed raw score: when the loss is
/// nonzero, appends (x, -eta * dloss/dm * y). Returns whether x was added.
bool kogd_update(std::vector<SupportVector>& buffer, const LossSpec& loss, double eta,
                 const SparseVector& x, int y, double score);

/// As above, computing the score from the buffer.
bool kogd_update(std::vector<SupportVector>& buffer, const KernelConfig& kernel,
                 const LossSpec& loss, double eta, const SparseVector& x, int y);

struct ForksConfig {
  KernelConfig kernel;
  LossSpec loss;
  std::size_t budget = 50;        // B
  std::size_t sketch_size = 50;   // s_p
  std::size_t sample_size = 10;   // s_m
  std::size_t rank = 5;           // k
  std::size_t blocks = 1;         // D
  std::size_t update_cycle = 1;   // rho
  double alpha = 0.01;
  double sigma_w = 0.5;
  double eta_w = 0.0;
  double kogd_eta = 0.2;
  double clip = 1.0;              // C in clip_h
  OnsOrdering ordering = OnsOrdering::updated_inverse;
  ProjectionPoint projection = ProjectionPoint::current_example;
  std::optional<double> pinv_tol;
  std::uint64_t seed = 0;

  /// Throws ConfigError on inconsistent sizes or parameters.
  void validate() const;
};

enum class Phase { filling, sketched };
enum class RoundKind { filling, update, regular };

struct RoundResult {
  int prediction = 1;
  double score = 0.0;
  RoundKind kind = RoundKind::filling;
};

/// Two-stage second-order online kernel learner.
///
/// Filling phase: budgeted KOGD; every nonzero-loss example joins the support
/// buffer until it holds B points. The sketches, the rank-k factorization of
/// phi_pp and the feature map are then built over the buffer and the ONS
/// state is reset.
///
/// Sketched phase: every `update_cycle`-th round appends the incoming example
/// as an anchor, updates the sketches, runs the truncated incremental SVD,
/// rebuilds the map and resets w and A^-1 before predicting. All other
/// rounds only embed, predict and take an ONS step, touching nothing of size
/// s_p.
class ForksLearner {
 public:
  explicit ForksLearner(ForksConfig config);

  RoundResult round(const SparseVector& x, int y);

  const ForksConfig& config() const noexcept { return config_; }
  Phase phase() const noexcept { return sketched_ ? Phase::sketched : Phase::filling; }
  const std::vector<SupportVector>& buffer() const noexcept { return buffer_; }
  std::size_t rounds_since_update() const noexcept { return rounds_since_update_; }
  /// Anchors behind the sketches (the buffer size while filling).
  std::size_t anchor_count() const noexcept;

  const SketchState* sketch() const noexcept { return sketched_ ? &sketched_->sketch : nullptr; }
  const SvdState* svd() const noexcept { return sketched_ ? &sketched_->svd : nullptr; }
  const FeatureMap* feature_map() const noexcept { return sketched_ ? &sketched_->map : nullptr; }
  const OnsState* ons() const noexcept { return sketched_ ? &sketched_->ons : nullptr; }

 private:
  struct Sketched {
    SketchState sketch;
    SvdState svd;
    std::vector<SparseVector> sampled;
    FeatureMap map;
    OnsState ons;
  };

  void enter_sketched_phase();
  void refresh(const SparseVector& x);

  ForksConfig config_;
  std::vector<SupportVector> buffer_;
  std::optional<Sketched> sketched_;
  std::size_t rounds_since_update_ = 0;
};

}  // namespace forks
