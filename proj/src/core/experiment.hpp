#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "data.hpp"
#include "learner.hpp"

namespace forks {

enum class Algorithm { forks, kogd, fogd };

/// How the learning stream is built from the dataset for a given seed.
enum class StreamMode { permute, adversarial, as_is };

/// Which length the update-cycle fraction theta multiplies.
enum class CycleBasis { stream, after_budget };  // N or N - B

struct RunConfig {
  Algorithm algorithm = Algorithm::forks;
  LossFamily loss = LossFamily::hinge;
  double bandwidth = 1.0;
  std::size_t budget = 50;
  std::optional<std::size_t> sketch_size;  // default B
  std::optional<std::size_t> sample_size;  // default gamma * s_p
  double gamma = 0.2;
  std::optional<std::size_t> rank;         // default ceil(B / 10)
  std::optional<std::size_t> blocks;       // default from the s_m rule below
  std::optional<std::size_t> update_cycle; // default floor(theta * basis)
  double theta = 0.3;
  CycleBasis cycle_basis = CycleBasis::stream;
  double alpha = 0.01;
  double sigma_w = 0.5;
  double eta_w = 0.0;
  double kogd_eta = 0.2;
  double clip = 1.0;
  OnsOrdering ordering = OnsOrdering::updated_inverse;
  ProjectionPoint projection = ProjectionPoint::current_example;
  std::optional<double> pinv_tol;
  std::optional<std::size_t> fogd_features;  // default 4B
  double fogd_eta = 0.2;
  StreamMode stream = StreamMode::permute;
  std::size_t adv_blocks = 500;
  std::size_t adv_repeats = 10;
  std::uint64_t seed = 0;
};

/// Seed handed to the learner; the stream itself uses the run seed.
std::uint64_t learner_seed(std::uint64_t seed);

/// Largest divisor of s_p not exceeding max(1, ceil(ln(s_m)^3)).
std::size_t default_blocks(std::size_t sketch_size, std::size_t sample_size);

/// Fills in every defaulted size for a stream of `stream_length` rounds and
/// validates the result. Throws ConfigError.
ForksConfig resolve_forks(const RunConfig& cfg, std::size_t stream_length);

/// The stream a run with this config and seed consumes.
Dataset build_stream(const RunConfig& cfg, const Dataset& ds);

struct RoundRecord {
  int label = 1;
  int prediction = 1;
  double score = 0.0;
  RoundKind kind = RoundKind::filling;
  std::size_t cumulative_mistakes = 0;
};

struct RunResult {
  std::vector<RoundRecord> rounds;
  std::size_t mistakes = 0;
  double mistake_rate = 0.0;  // percent
  double seconds_filling = 0.0;
  double seconds_update = 0.0;
  double seconds_regular = 0.0;
  std::size_t anchors = 0;    // mu; support vectors for the KOGD baseline
  ForksConfig resolved;       // sizes actually used (forks only)
  std::size_t fogd_features = 0;
};

/// Streams build_stream(cfg, ds) through the selected learner; each
/// prediction is recorded before the label is revealed. Timing covers the
/// learner only. Throws ConfigError or InputError.
RunResult run(const RunConfig& cfg, const Dataset& ds);

/// The 2^{-5:0.5:7} bandwidth grid.
std::vector<double> default_bandwidth_grid();

struct BandwidthChoice {
  double bandwidth = 1.0;
  std::vector<double> rates;  // one per grid entry
};

/// Runs cfg once per grid value (on the stream for cfg.seed) and returns the
/// bandwidth with the lowest mistake rate; ties keep the smaller bandwidth.
BandwidthChoice select_bandwidth(const RunConfig& cfg, const Dataset& ds,
                                 const std::vector<double>& grid);

struct TisvdBench {
  std::size_t sketch_size = 0;
  std::size_t rank = 0;
  std::size_t steps = 0;
  double tisvd_us = 0.0;   // mean per update
  double dense_us = 0.0;   // mean per dense truncated eigendecomposition
  double tisvd_error = 0.0;  // relative Frobenius error vs phi_pp after the last step
  double dense_error = 0.0;
  double speedup() const noexcept { return dense_us / tisvd_us; }
};

/// Feeds `steps` rank-3 sketch updates (from synthetic points) to both TISVD
/// and a dense top-k eigendecomposition of the updated phi_pp, timing only
/// the factorization work. Throws ConfigError if steps < 1 or k > s_p.
TisvdBench bench_tisvd(std::size_t sketch_size, std::size_t rank, std::size_t steps,
                       std::uint64_t seed);

}  // namespace forks
