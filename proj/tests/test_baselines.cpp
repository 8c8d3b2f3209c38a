#include <doctest.h>

#include <cmath>

#include "baselines.hpp"
#include "data.hpp"
#include "errors.hpp"
#include "oracles.hpp"

using namespace forks;

TEST_CASE("fogd: first prediction is the tie-break label") {
  const auto pts = oracle::random_points(1, 4, 1);
  FogdLearner f(4, 16, {KernelFamily::gaussian, 1.0}, 0.2, {}, 3);
  const auto r = f.round(pts[0], -1);
  CHECK(r.score == 0.0);
  CHECK(r.prediction == 1);
  CHECK_FALSE(f.weights().isZero());
}

TEST_CASE("fogd: zero-loss rounds do not move w") {
  const auto pts = oracle::random_points(1, 3, 2);
  FogdLearner f(3, 32, {KernelFamily::gaussian, 1.0}, 0.5, {}, 4);
  RoundResult r;
  int guard = 0;
  do {
    r = f.round(pts[0], 1);
  } while (r.score < 1.0 && ++guard < 1000);
  REQUIRE(guard < 1000);
  const Eigen::VectorXd w = f.weights();
  f.round(pts[0], 1);
  CHECK(f.weights() == w);
}

TEST_CASE("fogd: random features approximate the kernel") {
  const auto pts = oracle::random_points(20, 5, 3, 0.7);
  const double sigma = 1.5;
  const FogdLearner f(5, 2000, {KernelFamily::gaussian, sigma}, 0.2, {}, 5);
  double mae = 0.0;
  for (std::size_t p = 0; p < 10; ++p) {
    const auto za = f.features(pts[2 * p]);
    const auto zb = f.features(pts[2 * p + 1]);
    CHECK(za.squaredNorm() <= 2.0);
    mae += std::abs(za.dot(zb) - oracle::kernel(pts[2 * p], pts[2 * p + 1], sigma, 5));
  }
  CHECK(mae / 10.0 <= 0.05);
}

TEST_CASE("fogd: seeded determinism and input checks") {
  const auto pts = oracle::random_points(1, 3, 6);
  const FogdLearner a(3, 8, {}, 0.2, {}, 9);
  const FogdLearner b(3, 8, {}, 0.2, {}, 9);
  CHECK(a.features(pts[0]) == b.features(pts[0]));
  SparseVector wide{{5}, {1.0}};
  CHECK_THROWS_AS(a.features(wide), InputError);
  CHECK_THROWS_AS(FogdLearner(3, 0, {}, 0.2, {}, 1), ConfigError);
  CHECK_THROWS_AS(FogdLearner(3, 4, {}, 0.0, {}, 1), ConfigError);
}

TEST_CASE("kogd budget: a budget never reached matches unbudgeted KOGD") {
  const auto syn = synth_lowrank(60, 4, 2, 1.0, 7);
  const KernelConfig cfg{KernelFamily::gaussian, 1.0};
  KogdBudgetLearner k(1000, cfg, 0.2, {});
  std::vector<SupportVector> free_buffer;
  for (const auto& ex : syn.dataset.examples) {
    const double ref = kogd_predict(free_buffer, cfg, ex.x);
    CHECK(k.round(ex.x, ex.y).score == ref);
    kogd_update(free_buffer, cfg, {}, 0.2, ex.x, ex.y);
  }
  CHECK(k.buffer().size() == free_buffer.size());
}

TEST_CASE("kogd budget: buffer freezes at B") {
  const auto syn = synth_lowrank(300, 4, 2, 1.0, 8);
  KogdBudgetLearner k(10, {KernelFamily::gaussian, 1.0}, 0.2, {});
  for (const auto& ex : syn.dataset.examples) {
    k.round(ex.x, ex.y);
    CHECK(k.buffer().size() <= 10);
  }
  CHECK(k.buffer().size() == 10);
}

TEST_CASE("kogd budget: separable synthetic stream") {
  // Two well-separated clusters.
  Rng rng(9);
  KogdBudgetLearner k(50, {KernelFamily::gaussian, 1.0}, 0.2, {});
  std::size_t mistakes = 0;
  for (int t = 0; t < 500; ++t) {
    const int y = rng.uniform() < 0.5 ? -1 : 1;
    std::vector<double> x{2.0 * y + 0.5 * rng.normal(), 0.5 * rng.normal()};
    mistakes += k.round(SparseVector::from_dense(x), y).prediction != y;
  }
  CHECK(static_cast<double>(mistakes) / 500.0 < 0.2);
}
