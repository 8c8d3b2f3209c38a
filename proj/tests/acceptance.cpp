// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit code is
// the number of failures. `acceptance N` runs criterion N only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "data.hpp"
#include "experiment.hpp"
#include "featmap.hpp"
#include "learner.hpp"
#include "oracles.hpp"
#include "sketch.hpp"
#include "tisvd.hpp"

using namespace forks;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1 ---------------------------------------------------------------------

Outcome incremental_sketch() {
  const std::size_t sps[] = {8, 16};
  const std::size_t sms[] = {3, 5};
  const std::size_t ds[] = {1, 2, 4};
  double worst = 0.0;
  for (std::size_t stream = 0; stream < 20; ++stream) {
    const std::size_t sp = sps[stream % 2];
    const std::size_t sm = sms[(stream / 2) % 2];
    const std::size_t d = ds[(stream / 4) % 3];
    const double sigma = 0.5 + 0.25 * static_cast<double>(stream % 7);
    const auto pts = oracle::random_points(25, 6, 1000 + stream);
    const std::vector<SparseVector> init(pts.begin(), pts.begin() + 15);
    auto st = init_sketches(init, {KernelFamily::gaussian, sigma}, sp, sm, d, stream);
    for (std::size_t t = 15; t < 25; ++t) update_sketches(st, pts[t]);
    const Eigen::MatrixXd k = oracle::gram(pts, sigma);
    const Eigen::MatrixXd s = oracle::sjlt_matrix(st.sjlt, 25);
    const Eigen::MatrixXd m = oracle::sample_matrix(st.sample.indices, 25);
    worst = std::max({worst, oracle::rel_fro(st.phi_pp, s.transpose() * k * s),
                      oracle::rel_fro(st.phi_pm, s.transpose() * k * m)});
  }
  return {worst <= 1e-8, fmt("max relative Frobenius error %.2e (tol 1e-8) over 20 streams", worst)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome tisvd_exactness() {
  double worst = 0.0;
  double worst_rel = 0.0;
  for (std::uint64_t chain = 0; chain < 5; ++chain) {
    Rng rng(2000 + chain);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(32, 8, rng));
    const Eigen::MatrixXd w = qr.householderQ() * Eigen::MatrixXd::Identity(32, 8);
    const Eigen::MatrixXd g = w.leftCols(5) * oracle::random_matrix(5, 5, rng);
    Eigen::MatrixXd dense = g * g.transpose();
    SvdState s = init_truncated(dense, 8);
    for (int step = 0; step < 100; ++step) {
      // Same shape as the sketch update: [a, b, a] [b, a, c a]^T.
      const Eigen::VectorXd a = w * oracle::random_matrix(8, 1, rng) * 0.2;
      const Eigen::VectorXd b = w * oracle::random_matrix(8, 1, rng) * 0.2;
      Eigen::MatrixXd d1(32, 3);
      Eigen::MatrixXd d2(32, 3);
      d1 << a, b, a;
      d2 << b, a, 0.5 * a;
      tisvd_update(s, {d1, d2}, 8);
      dense += d1 * d2.transpose();
    }
    worst = std::max(worst, (reconstruct(s) - dense).norm());
    worst_rel = std::max(worst_rel, oracle::rel_fro(reconstruct(s), dense));
  }
  return {worst <= 1e-6, fmt("max Frobenius error %.2e (tol 1e-6; relative %.2e) over 5 chains", worst,
                             worst_rel)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome tisvd_speed() {
  const TisvdBench small = bench_tisvd(128, 32, 100, 3);
  const TisvdBench big = bench_tisvd(512, 32, 100, 3);
  const bool pass = big.speedup() >= 5.0 && big.speedup() > small.speedup();
  return {pass, fmt("speedup %.1fx at s_p=512 (need >= 5), %.1fx at s_p=128 (need below 512's)",
                    big.speedup(), small.speedup())};
}

// ---- 4 ---------------------------------------------------------------------

Outcome ons_inverse() {
  double worst = 0.0;
  double worst_excess = -1.0;
  std::size_t projections = 0;
  Rng rng(4);
  const double alpha = 0.01;
  const double weight = 0.5;
  OnsState s = OnsState::reset(8, alpha, weight, 0.0);
  Eigen::MatrixXd a = alpha * Eigen::MatrixXd::Identity(8, 8);
  for (int step = 0; step < 50; ++step) {
    const Eigen::VectorXd phi = oracle::random_matrix(8, 1, rng);
    const double g_scale = rng.normal();
    a += weight * g_scale * g_scale * phi * phi.transpose();
    const Eigen::VectorXd v = s.w - a.inverse() * (g_scale * phi);
    ons_step(s, phi, g_scale, 1.0);
    const Eigen::MatrixXd direct = a.inverse();
    worst = std::max(worst, (s.A_inv - direct).norm() / direct.norm());
    if (std::abs(phi.dot(v)) >= 1.0) {
      ++projections;
      worst_excess = std::max(worst_excess, std::abs(phi.dot(s.w)) - 1.0);
    }
  }
  const bool pass = worst <= 1e-8 && worst_excess <= 1e-9 && projections > 0;
  return {pass, fmt("inverse rel err %.2e (tol 1e-8); %zu projections, max |phi^T w| - C = %.2e (tol 1e-9)",
                    worst, projections, worst_excess)};
}

// ---- 5-7 -------------------------------------------------------------------

struct Evaluation {
  double bandwidth = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double minority_share = 0.0;  // mean fraction of rounds predicting the rarer label
};

// sigma from the grid on seed 0, then the mean over seeds 1..20.
Evaluation evaluate(RunConfig cfg, const Dataset& ds) {
  cfg.seed = 0;
  Evaluation e;
  e.bandwidth = select_bandwidth(cfg, ds, default_bandwidth_grid()).bandwidth;
  cfg.bandwidth = e.bandwidth;
  std::vector<double> rates;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    cfg.seed = seed;
    const RunResult r = run(cfg, ds);
    rates.push_back(r.mistake_rate);
    std::size_t pos = 0;
    for (const auto& rr : r.rounds) pos += rr.prediction == 1;
    const double share = static_cast<double>(pos) / static_cast<double>(r.rounds.size());
    e.minority_share += std::min(share, 1.0 - share) / 20.0;
  }
  for (double x : rates) e.mean += x / 20.0;
  for (double x : rates) e.sd += (x - e.mean) * (x - e.mean) / 19.0;
  e.sd = std::sqrt(e.sd);
  return e;
}

std::string describe(const char* name, const Evaluation& e) {
  return fmt("%s %.3f +- %.3f (sigma %.4g, minority predictions %.1f%%)", name, e.mean, e.sd, e.bandwidth,
             100.0 * e.minority_share);
}

// A run that (almost) always predicts one label has learned nothing.
constexpr double kMinMinorityShare = 0.01;

double majority_rate(const Dataset& ds) {
  std::size_t pos = 0;
  for (const auto& ex : ds.examples) pos += ex.y == 1;
  const double p = static_cast<double>(pos) / static_cast<double>(ds.size());
  return 100.0 * std::min(p, 1.0 - p);
}

Outcome german_table() {
  const Dataset ds = minmax_scale(load_libsvm(std::string(FORKS_DATA_DIR) + "/german"));
  RunConfig cfg;
  cfg.budget = 50;
  const Evaluation f = evaluate(cfg, ds);
  cfg.algorithm = Algorithm::kogd;
  const Evaluation k = evaluate(cfg, ds);
  const bool pass = f.mean <= 30.5 && f.mean <= k.mean && f.minority_share >= kMinMinorityShare;
  return {pass, describe("forks", f) + "; " + describe("kogd", k) +
                    fmt("; need forks <= 30.5, <= kogd, minority >= 1%% (majority rate %.1f)",
                        majority_rate(ds))};
}

Outcome svmguide3_table() {
  const Dataset ds = load_libsvm(std::string(FORKS_DATA_DIR) + "/svmguide3");
  RunConfig cfg;
  cfg.budget = 50;
  const Evaluation f = evaluate(cfg, ds);
  const bool pass = f.mean <= 24.0 && f.minority_share >= kMinMinorityShare;
  return {pass, describe("forks", f) +
                    fmt("; need <= 24.0, minority >= 1%% (majority rate %.1f)", majority_rate(ds))};
}

Outcome adversarial_table() {
  const Dataset ds = minmax_scale(load_libsvm(std::string(FORKS_DATA_DIR) + "/german"));
  RunConfig cfg;
  cfg.stream = StreamMode::adversarial;
  cfg.adv_blocks = 500;
  cfg.adv_repeats = 10;
  cfg.budget = 200;
  cfg.sketch_size = 150;
  cfg.rank = 20;
  cfg.theta = 0.005;
  cfg.cycle_basis = CycleBasis::after_budget;
  const Evaluation f = evaluate(cfg, ds);
  cfg.algorithm = Algorithm::fogd;
  const Evaluation g = evaluate(cfg, ds);
  cfg.algorithm = Algorithm::kogd;
  const Evaluation k = evaluate(cfg, ds);
  const bool pass = f.mean <= 12.0 && f.mean < g.mean && f.mean < k.mean &&
                    f.minority_share >= kMinMinorityShare;
  return {pass, describe("forks", f) + "; " + describe("fogd", g) + "; " + describe("kogd", k) +
                    "; need forks <= 12 and below both"};
}

// ---- 8 ---------------------------------------------------------------------

Outcome approximation_monotone() {
  const double sigma = 2.0;
  const SyntheticData syn = synth_lowrank(200, 10, 6, sigma, 8);
  std::vector<SparseVector> pts;
  for (const auto& ex : syn.dataset.examples) pts.push_back(ex.x);
  const KernelConfig cfg{KernelFamily::gaussian, sigma};

  std::vector<double> medians;
  for (const std::size_t sm : {10, 20, 40}) {
    const std::size_t sp = 5 * sm;
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto st = init_sketches(pts, cfg, sp, sm, default_blocks(sp, sm), seed);
      const SvdState svd = init_truncated(st.phi_pp, sm);
      const FeatureMap map = build_map(st.phi_pm, svd, st.sampled_anchors(), cfg);
      Eigen::MatrixXd emb(200, static_cast<Eigen::Index>(sm));
      for (Eigen::Index i = 0; i < 200; ++i) emb.row(i) = map.embed(pts[static_cast<std::size_t>(i)]).transpose();
      errs.push_back(oracle::rel_fro(emb * emb.transpose(), syn.gram));
    }
    std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
    const double upper = errs[10];
    const double lower = *std::max_element(errs.begin(), errs.begin() + 10);
    medians.push_back(0.5 * (upper + lower));
  }
  const bool pass = medians[1] <= medians[0] && medians[2] <= medians[1];
  return {pass, fmt("median relative error %.4f / %.4f / %.4f for s_m = 10 / 20 / 40 (non-increasing)",
                    medians[0], medians[1], medians[2])};
}

// ---- 9 ---------------------------------------------------------------------

Outcome product_preservation() {
  const auto r = product_preservation_stat(32, 4, 500, 0.1, 9);
  return {r.failure_rate <= 0.15, fmt("failure rate %.3f (tol 0.15), median ratio %.4f", r.failure_rate,
                                      r.median_ratio)};
}

// ---- 10 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "forks_acceptance";
  fs::create_directories(dir);
  const std::string data = std::string(FORKS_DATA_DIR) + "/german";
  const std::vector<std::string> variants = {
      "--algorithm forks --scale --bandwidth 2",
      "--algorithm kogd --bandwidth 4",
      "--algorithm fogd --scale --bandwidth 1",
      "--algorithm forks --scale --stream adversarial --budget 200 --sketch-size 150 --rank 20 "
      "--theta 0.005 --cycle-basis after-budget --bandwidth 2.83"};
  std::size_t same = 0;
  std::size_t bytes = 0;
  for (const auto& v : variants) {
    std::string out[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path file = dir / ("run" + std::to_string(rep) + ".csv");
      const std::string cmd = std::string(FORKS_CLI) + " run --data " + data + " " + v +
                              " --seed 11 --rounds " + file.string() + " --summary " +
                              (dir / "summary.csv").string();
      if (std::system(cmd.c_str()) != 0) return {false, "cli run failed: " + cmd};
      out[rep] = slurp(file);
    }
    same += !out[0].empty() && out[0] == out[1];
    bytes += out[0].size();
  }
  return {same == variants.size(),
          fmt("%zu of %zu repeated runs byte-identical (%zu bytes compared)", same, variants.size(), bytes)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "incremental sketches equal batch recomputation", 5, incremental_sketch},
      {2, "TISVD exact without truncation", 5, tisvd_exactness},
      {3, "TISVD faster than dense truncated eigendecomposition", 60, tisvd_speed},
      {4, "ONS inverse maintenance and projection", 1, ons_inverse},
      {5, "german mistake rate, B=50", 120, german_table},
      {6, "svmguide3 mistake rate, B=50", 120, svmguide3_table},
      {7, "adversarial german-1", 180, adversarial_table},
      {8, "kernel approximation improves with sample size", 30, approximation_monotone},
      {9, "SJLT matrix product preservation", 30, product_preservation},
      {10, "run output is deterministic", 60, cli_determinism},
  };
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%d] %s: %s; %.2f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures;
}
