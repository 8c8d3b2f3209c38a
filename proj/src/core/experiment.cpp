#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "baselines.hpp"
#include "errors.hpp"
#include "random.hpp"
#include "sketch.hpp"
#include "tisvd.hpp"

namespace forks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::uint64_t learner_seed(std::uint64_t seed) { return hash_combine(seed, 0x6c6561726eULL, 1); }

std::size_t default_blocks(std::size_t sketch_size, std::size_t sample_size) {
  const double l = std::log(static_cast<double>(std::max<std::size_t>(sample_size, 1)));
  const auto cap = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(l * l * l - 1e-9)));
  for (std::size_t d = std::min(cap, sketch_size); d > 1; --d) {
    if (sketch_size % d == 0) return d;
  }
  return 1;
}

ForksConfig resolve_forks(const RunConfig& cfg, std::size_t stream_length) {
  if (cfg.budget == 0) throw ConfigError("budget must be positive");
  if (!(cfg.gamma > 0.0) || !(cfg.theta > 0.0)) throw ConfigError("gamma and theta must be positive");

  ForksConfig out;
  out.kernel = {KernelFamily::gaussian, cfg.bandwidth};
  out.loss = {cfg.loss};
  out.budget = cfg.budget;
  out.sketch_size = cfg.sketch_size.value_or(cfg.budget);
  out.sample_size = cfg.sample_size.value_or(std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.gamma * static_cast<double>(out.sketch_size) + 1e-9))));
  out.rank = cfg.rank.value_or((cfg.budget + 9) / 10);
  out.blocks = cfg.blocks.value_or(default_blocks(out.sketch_size, out.sample_size));
  if (cfg.update_cycle) {
    out.update_cycle = *cfg.update_cycle;
  } else {
    const std::size_t basis = cfg.cycle_basis == CycleBasis::stream
                                  ? stream_length
                                  : (stream_length > cfg.budget ? stream_length - cfg.budget : 0);
    out.update_cycle = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(cfg.theta * static_cast<double>(basis) + 1e-9)));
  }
  out.alpha = cfg.alpha;
  out.sigma_w = cfg.sigma_w;
  out.eta_w = cfg.eta_w;
  out.kogd_eta = cfg.kogd_eta;
  out.clip = cfg.clip;
  out.ordering = cfg.ordering;
  out.projection = cfg.projection;
  out.pinv_tol = cfg.pinv_tol;
  out.seed = learner_seed(cfg.seed);
  out.validate();
  return out;
}

Dataset build_stream(const RunConfig& cfg, const Dataset& ds) {
  switch (cfg.stream) {
    case StreamMode::permute:
      return permute(ds, cfg.seed);
    case StreamMode::adversarial:
      return adversarial_stream(ds, cfg.adv_blocks, cfg.adv_repeats, cfg.seed);
    case StreamMode::as_is:
      break;
  }
  return ds;
}

namespace {

template <typename Learner>
void drive(Learner& learner, const Dataset& stream, RunResult& out) {
  out.rounds.reserve(stream.size());
  for (const auto& ex : stream.examples) {
    const auto start = Clock::now();
    const RoundResult r = learner.round(ex.x, ex.y);
    const double dt = seconds_since(start);
    switch (r.kind) {
      case RoundKind::filling: out.seconds_filling += dt; break;
      case RoundKind::update: out.seconds_update += dt; break;
      case RoundKind::regular: out.seconds_regular += dt; break;
    }
    if (r.prediction != ex.y) ++out.mistakes;
    out.rounds.push_back({ex.y, r.prediction, r.score, r.kind, out.mistakes});
  }
  out.mistake_rate = stream.size() == 0
                         ? 0.0
                         : 100.0 * static_cast<double>(out.mistakes) / static_cast<double>(stream.size());
}

}  // namespace

RunResult run(const RunConfig& cfg, const Dataset& ds) {
  const Dataset stream = build_stream(cfg, ds);
  const KernelConfig kernel{KernelFamily::gaussian, cfg.bandwidth};
  kernel.validate();
  const LossSpec loss{cfg.loss};

  RunResult out;
  switch (cfg.algorithm) {
    case Algorithm::forks: {
      ForksLearner learner(resolve_forks(cfg, stream.size()));
      out.resolved = learner.config();
      drive(learner, stream, out);
      out.anchors = learner.anchor_count();
      break;
    }
    case Algorithm::kogd: {
      KogdBudgetLearner learner(cfg.budget, kernel, cfg.kogd_eta, loss);
      drive(learner, stream, out);
      out.anchors = learner.buffer().size();
      break;
    }
    case Algorithm::fogd: {
      out.fogd_features = cfg.fogd_features.value_or(4 * cfg.budget);
      FogdLearner learner(std::max<std::size_t>(stream.dim, 1), out.fogd_features, kernel,
                          cfg.fogd_eta, loss, learner_seed(cfg.seed));
      drive(learner, stream, out);
      break;
    }
  }
  return out;
}

std::vector<double> default_bandwidth_grid() {
  std::vector<double> grid;
  for (int e = -10; e <= 14; ++e) grid.push_back(std::exp2(0.5 * e));
  return grid;
}

BandwidthChoice select_bandwidth(const RunConfig& cfg, const Dataset& ds,
                                 const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("bandwidth grid is empty");
  BandwidthChoice out;
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    RunConfig c = cfg;
    c.bandwidth = grid[i];
    const double rate = run(c, ds).mistake_rate;
    out.rates.push_back(rate);
    if (i == 0 || rate < best) {
      best = rate;
      out.bandwidth = grid[i];
    }
  }
  return out;
}

TisvdBench bench_tisvd(std::size_t sketch_size, std::size_t rank, std::size_t steps,
                       std::uint64_t seed) {
  if (steps == 0) throw ConfigError("bench_tisvd needs at least one step");
  if (rank == 0 || rank > sketch_size) throw ConfigError("bench_tisvd needs 1 <= k <= s_p");

  const std::size_t dim = 16;
  const SyntheticData synth = synth_lowrank(sketch_size + steps, dim, 8, 2.0, seed);
  const KernelConfig kernel{KernelFamily::gaussian, 2.0};
  std::vector<SparseVector> points;
  points.reserve(synth.dataset.size());
  for (const auto& ex : synth.dataset.examples) points.push_back(ex.x);

  const std::size_t sample = std::max<std::size_t>(1, sketch_size / 5);
  SketchState sketch =
      init_sketches(std::span(points).first(sketch_size), kernel, sketch_size, sample,
                    default_blocks(sketch_size, sample), hash_combine(seed, 0x62656e6368ULL, 0));
  SvdState incremental = init_truncated(sketch.phi_pp, rank);
  SvdState dense;

  TisvdBench out;
  out.sketch_size = sketch_size;
  out.rank = rank;
  out.steps = steps;
  double t_inc = 0.0;
  double t_dense = 0.0;
  for (std::size_t s = 0; s < steps; ++s) {
    const LowRankUpdate update = update_sketches(sketch, points[sketch_size + s]);
    auto start = Clock::now();
    tisvd_update(incremental, update, rank);
    t_inc += seconds_since(start);
    start = Clock::now();
    dense = init_truncated(sketch.phi_pp, rank);
    t_dense += seconds_since(start);
  }
  const double n = static_cast<double>(steps);
  out.tisvd_us = 1e6 * t_inc / n;
  out.dense_us = 1e6 * t_dense / n;
  const double norm = std::max(sketch.phi_pp.norm(), 1e-300);
  out.tisvd_error = (sketch.phi_pp - reconstruct(incremental)).norm() / norm;
  out.dense_error = (sketch.phi_pp - reconstruct(dense)).norm() / norm;
  return out;
}

}  // namespace forks
