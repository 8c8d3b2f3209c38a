#include <doctest.h>

#include <cmath>

#include "baselines.hpp"
#include "data.hpp"
#include "errors.hpp"
#include "learner.hpp"
#include "oracles.hpp"

using namespace forks;

TEST_CASE("clip_h") {
  CHECK(clip_h(0.5, 1.0) == 0.0);
  CHECK(clip_h(-3.0, 1.0) == -2.0);
  CHECK(clip_h(0.0, 1.0) == 0.0);
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    const double z = 5.0 * rng.normal();
    CHECK(clip_h(z, 0.0) == z);
  }
}

TEST_CASE("losses") {
  const LossSpec hinge{LossFamily::hinge};
  const LossSpec sq{LossFamily::squared_hinge};
  CHECK(hinge.value(0.25) == 0.75);
  CHECK(hinge.derivative(0.25) == -1.0);
  CHECK(hinge.derivative(1.0) == 0.0);
  CHECK(sq.value(-1.0) == 4.0);
  CHECK(sq.derivative(-1.0) == -4.0);
  CHECK(sq.derivative(2.0) == 0.0);
  CHECK(sign_label(0.0) == 1);
  CHECK(sign_label(-1e-300) == -1);
}

TEST_CASE("ons_step: zero gradient leaves a feasible state alone") {
  OnsState s = OnsState::reset(3, 0.5, 0.5, 0.0);
  s.w << 0.1, -0.2, 0.3;
  const OnsState before = s;
  const Eigen::Vector3d phi(1.0, 1.0, 1.0);
  ons_step(s, phi, 0.0, 1.0);
  CHECK(s.w == before.w);
  CHECK(s.A_inv == before.A_inv);
}

TEST_CASE("ons_step: scalar recursion") {
  const Eigen::VectorXd phi = Eigen::VectorXd::Ones(1);
  OnsState upd = OnsState::reset(1, 1.0, 0.5, 0.0);
  ons_step(upd, phi, -1.0, 1.0, OnsOrdering::updated_inverse);
  CHECK(upd.A_inv(0, 0) == doctest::Approx(1.0 / 1.5));
  CHECK(upd.w(0) == doctest::Approx(2.0 / 3.0));

  OnsState cur = OnsState::reset(1, 1.0, 0.5, 0.0);
  ons_step(cur, phi, -1.0, 1.0, OnsOrdering::current_inverse);
  CHECK(cur.A_inv(0, 0) == doctest::Approx(1.0 / 1.5));
  CHECK(cur.w(0) == doctest::Approx(1.0));
}

TEST_CASE("ons_step: maintained inverse and projection over random steps") {
  for (const auto ordering : {OnsOrdering::updated_inverse, OnsOrdering::current_inverse}) {
    Rng rng(2);
    const double alpha = 0.01;
    const double weight = 0.5;
    OnsState s = OnsState::reset(8, alpha, weight, 0.0);
    Eigen::MatrixXd a = alpha * Eigen::MatrixXd::Identity(8, 8);
    for (int step = 0; step < 50; ++step) {
      const Eigen::VectorXd phi = oracle::random_matrix(8, 1, rng);
      const double g_scale = rng.normal();
      const Eigen::MatrixXd a_used = ordering == OnsOrdering::updated_inverse
                                         ? Eigen::MatrixXd(a + weight * g_scale * g_scale * phi * phi.transpose())
                                         : a;
      const Eigen::VectorXd v = s.w - a_used.inverse() * (g_scale * phi);
      ons_step(s, phi, g_scale, 1.0, ordering);
      a += weight * g_scale * g_scale * phi * phi.transpose();
      const Eigen::MatrixXd direct = a.inverse();
      CHECK((s.A_inv - direct).norm() <= 1e-8 * direct.norm());
      CHECK((s.A_inv - s.A_inv.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
      if (std::abs(phi.dot(v)) >= 1.0) {
        CHECK(std::abs(phi.dot(s.w)) <= 1.0 + 1e-9);
      } else {
        CHECK((s.w - v).norm() <= 1e-9 * std::max(1.0, v.norm()));
      }
    }
  }
}

TEST_CASE("ons_step: indefinite inverse is reported") {
  OnsState s = OnsState::reset(2, 1.0, 0.0, 0.0);
  s.A_inv = -Eigen::MatrixXd::Identity(2, 2);
  s.w << 5.0, 5.0;
  CHECK_THROWS_AS(ons_step(s, Eigen::Vector2d(1.0, 0.0), 0.0, 1.0), NumericError);
  CHECK_THROWS_AS(ons_step(s, Eigen::Vector3d(1.0, 0.0, 0.0), 1.0, 1.0), InputError);
}

TEST_CASE("kogd_predict") {
  const auto pts = oracle::random_points(11, 3, 3);
  const KernelConfig cfg{KernelFamily::gaussian, 1.0};
  CHECK(kogd_predict({}, cfg, pts[0]) == 0.0);
  const std::vector<SupportVector> one{{pts[0], 0.2}};
  CHECK(kogd_predict(one, cfg, pts[0]) == doctest::Approx(0.2));

  std::vector<SupportVector> buf;
  double ref = 0.0;
  for (std::size_t i = 1; i < 11; ++i) {
    buf.push_back({pts[i], 0.1 * static_cast<double>(i) - 0.5});
    ref += buf.back().coef * oracle::kernel(pts[i], pts[0], 1.0, 3);
  }
  CHECK(std::abs(kogd_predict(buf, cfg, pts[0]) - ref) <= 1e-12);
}

TEST_CASE("kogd_update") {
  const auto pts = oracle::random_points(2, 3, 4);
  const KernelConfig cfg{KernelFamily::gaussian, 1.0};
  std::vector<SupportVector> buf;
  CHECK(kogd_update(buf, cfg, {}, 0.2, pts[0], -1));
  REQUIRE(buf.size() == 1);
  CHECK(buf[0].coef == doctest::Approx(-0.2));

  std::vector<SupportVector> confident{{pts[1], 5.0}};
  CHECK_FALSE(kogd_update(confident, cfg, {}, 0.2, pts[1], 1));
  CHECK(confident.size() == 1);

  std::vector<SupportVector> sq;
  kogd_update(sq, cfg, {LossFamily::squared_hinge}, 0.2, pts[0], 1);
  CHECK(sq[0].coef == doctest::Approx(0.4));
}

TEST_CASE("budgeted buffer size follows the nonzero-loss count") {
  const auto syn = synth_lowrank(100, 5, 3, 1.0, 5);
  const KernelConfig cfg{KernelFamily::gaussian, 1.0};
  KogdBudgetLearner kogd(50, cfg, 0.2, {});
  std::vector<SupportVector> shadow;
  std::size_t nonzero = 0;
  for (const auto& ex : syn.dataset.examples) {
    double f = 0.0;
    for (const auto& sv : shadow) f += sv.coef * oracle::kernel(sv.x, ex.x, 1.0, 5);
    if (1.0 - ex.y * f > 0.0) {
      ++nonzero;
      if (shadow.size() < 50) shadow.push_back({ex.x, 0.2 * ex.y});
    }
    kogd.round(ex.x, ex.y);
  }
  CHECK(kogd.buffer().size() == std::min<std::size_t>(50, nonzero));
  CHECK(kogd.buffer().size() == shadow.size());
}

namespace {

ForksConfig small_config(std::size_t budget, std::size_t cycle) {
  ForksConfig c;
  c.kernel = {KernelFamily::gaussian, 2.0};
  c.budget = budget;
  c.sketch_size = budget;
  c.sample_size = std::max<std::size_t>(1, budget / 5);
  c.rank = std::max<std::size_t>(1, budget / 10);
  c.blocks = 1;
  c.update_cycle = cycle;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("forks: a stream no longer than the budget is pure KOGD") {
  const auto syn = synth_lowrank(20, 4, 2, 2.0, 6);
  ForksLearner forks(small_config(20, 5));
  KogdBudgetLearner kogd(20, {KernelFamily::gaussian, 2.0}, 0.2, {});
  for (const auto& ex : syn.dataset.examples) {
    const auto a = forks.round(ex.x, ex.y);
    const auto b = kogd.round(ex.x, ex.y);
    CHECK(a.kind == RoundKind::filling);
    CHECK(a.prediction == b.prediction);
    CHECK(a.score == b.score);
  }
}

TEST_CASE("forks: phases, anchor growth and resets") {
  const auto syn = synth_lowrank(400, 6, 3, 2.0, 7);
  const std::size_t budget = 20;
  const std::size_t rho = 7;
  ForksLearner learner(small_config(budget, rho));
  std::size_t filled_at = 0;
  std::size_t t = 0;
  for (const auto& ex : syn.dataset.examples) {
    ++t;
    const bool was_filling = learner.phase() == Phase::filling;
    const auto r = learner.round(ex.x, ex.y);
    if (was_filling) {
      CHECK(r.kind == RoundKind::filling);
      if (learner.phase() == Phase::sketched) {
        filled_at = t;
        CHECK(learner.anchor_count() == budget);
        CHECK(learner.ons()->w.isZero());
      }
      continue;
    }
    const std::size_t after = t - filled_at;
    CHECK(learner.anchor_count() == budget + after / rho);
    if (after % rho == 0) {
      CHECK(r.kind == RoundKind::update);
      CHECK(r.score == 0.0);
      CHECK(r.prediction == 1);
    } else {
      CHECK(r.kind == RoundKind::regular);
    }
    if (after == 1) {
      CHECK(r.score == 0.0);
      CHECK(r.prediction == 1);
    }
  }
  REQUIRE(filled_at > 0);
  CHECK(learner.sketch()->phi_pp.rows() == static_cast<Eigen::Index>(budget));
  CHECK(learner.svd()->rank() == 2);
  CHECK(learner.feature_map()->dim() == 2);
}

TEST_CASE("forks: deterministic replay") {
  const auto syn = synth_lowrank(300, 5, 3, 2.0, 8);
  for (const auto proj : {ProjectionPoint::current_example, ProjectionPoint::next_example}) {
    auto cfg = small_config(30, 11);
    cfg.projection = proj;
    ForksLearner a(cfg);
    ForksLearner b(cfg);
    for (const auto& ex : syn.dataset.examples) {
      const auto ra = a.round(ex.x, ex.y);
      const auto rb = b.round(ex.x, ex.y);
      CHECK(ra.score == rb.score);
    }
  }
}

TEST_CASE("forks: learns a low-rank problem") {
  const auto syn = synth_lowrank(1500, 8, 3, 4.0, 9);
  auto cfg = small_config(50, 300);
  cfg.kernel.bandwidth = 4.0;
  ForksLearner learner(cfg);
  std::size_t mistakes = 0;
  for (const auto& ex : syn.dataset.examples) mistakes += learner.round(ex.x, ex.y).prediction != ex.y;
  CHECK(static_cast<double>(mistakes) / 1500.0 < 0.2);
}

TEST_CASE("forks: configuration validation") {
  auto bad = small_config(20, 5);
  bad.sample_size = 30;
  CHECK_THROWS_AS(ForksLearner{bad}, ConfigError);
  bad = small_config(20, 5);
  bad.blocks = 3;
  CHECK_THROWS_AS(ForksLearner{bad}, ConfigError);
  bad = small_config(20, 5);
  bad.rank = 21;
  CHECK_THROWS_AS(ForksLearner{bad}, ConfigError);
  bad = small_config(20, 5);
  bad.update_cycle = 0;
  CHECK_THROWS_AS(ForksLearner{bad}, ConfigError);
  bad = small_config(20, 5);
  bad.alpha = 0.0;
  CHECK_THROWS_AS(ForksLearner{bad}, ConfigError);
}
