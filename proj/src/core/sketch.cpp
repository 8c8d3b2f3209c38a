#include "sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "random.hpp"

namespace forks {

void SjltSpec::validate() const {
  if (blocks == 0 || sketch_size == 0) {
    throw ConfigError("SJLT requires positive sketch size and block count");
  }
  if (sketch_size % blocks != 0) {
    throw ConfigError("SJLT sketch size must be a multiple of the block count");
  }
}

std::vector<SjltEntry> sjlt_row(const SjltSpec& spec, std::size_t anchor_index) {
  const std::size_t width = spec.block_width();
  const double magnitude = 1.0 / std::sqrt(static_cast<double>(spec.blocks));
  std::vector<SjltEntry> row;
  row.reserve(spec.blocks);
  for (std::size_t k = 0; k < spec.blocks; ++k) {
    const std::uint64_t z = hash_combine(spec.seed, k, anchor_index);
    // High 32 bits pick the bucket (multiply-shift range reduction), the low
    // bit picks the sign.
    const auto bucket = static_cast<std::size_t>(((z >> 32) * width) >> 32);
    row.push_back({k * width + bucket, (z & 1U) ? magnitude : -magnitude});
  }
  return row;
}

Eigen::VectorXd sjlt_row_dense(const SjltSpec& spec, std::size_t anchor_index) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.sketch_size));
  for (const auto& e : sjlt_row(spec, anchor_index)) out(static_cast<Eigen::Index>(e.column)) = e.value;
  return out;
}

Eigen::VectorXd apply_sjlt_transpose(const SjltSpec& spec, std::size_t anchor_count,
                                     const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != anchor_count) {
    throw InputError("apply_sjlt_transpose: vector length does not match anchor count");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.sketch_size));
  for (std::size_t i = 0; i < anchor_count; ++i) {
    const double vi = v(static_cast<Eigen::Index>(i));
    if (!std::isfinite(vi)) throw InputError("apply_sjlt_transpose: non-finite input");
    for (const auto& e : sjlt_row(spec, i)) out(static_cast<Eigen::Index>(e.column)) += e.value * vi;
  }
  return out;
}

std::vector<SparseVector> SketchState::sampled_anchors() const {
  std::vector<SparseVector> out;
  out.reserve(sample.indices.size());
  for (auto i : sample.indices) out.push_back(anchors[i]);
  return out;
}

namespace {

void symmetrize(Eigen::MatrixXd& m) {
  const Eigen::MatrixXd t = m.transpose();
  m = 0.5 * (m + t);
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    std::uint64_t seed) {
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

SketchState init_sketches(std::span<const SparseVector> buffer, const KernelConfig& kernel,
                          std::size_t sketch_size, std::size_t sample_size, std::size_t blocks,
                          std::uint64_t seed) {
  kernel.validate();
  SjltSpec sjlt{seed, blocks, sketch_size};
  sjlt.validate();
  if (sample_size == 0) throw ConfigError("sample size must be positive");
  if (buffer.size() < sample_size) {
    throw ConfigError("anchor buffer is smaller than the sample size");
  }
  if (sample_size > sketch_size) throw ConfigError("sample size exceeds sketch size");

  SketchState state;
  state.kernel = kernel;
  state.sjlt = sjlt;
  state.anchors.assign(buffer.begin(), buffer.end());
  state.sample.seed = splitmix64(seed ^ 0x53414d504c45ULL);
  state.sample.sample_size = sample_size;
  state.sample.indices = sample_without_replacement(buffer.size(), sample_size, state.sample.seed);

  const Eigen::MatrixXd k = gram(kernel, state.anchors);
  const auto n = static_cast<Eigen::Index>(buffer.size());
  const auto sp = static_cast<Eigen::Index>(sketch_size);
  const auto sm = static_cast<Eigen::Index>(sample_size);

  std::vector<std::vector<SjltEntry>> rows(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) rows[i] = sjlt_row(sjlt, i);

  // C_p = K S_p, then phi_pp = S_p^T C_p.
  Eigen::MatrixXd cp = Eigen::MatrixXd::Zero(n, sp);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (const auto& e : rows[static_cast<std::size_t>(j)]) {
      cp.col(static_cast<Eigen::Index>(e.column)) += e.value * k.col(j);
    }
  }
  Eigen::MatrixXd cm(n, sm);
  for (Eigen::Index c = 0; c < sm; ++c) {
    cm.col(c) = k.col(static_cast<Eigen::Index>(state.sample.indices[static_cast<std::size_t>(c)]));
  }
  state.phi_pp = Eigen::MatrixXd::Zero(sp, sp);
  state.phi_pm = Eigen::MatrixXd::Zero(sp, sm);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& e : rows[static_cast<std::size_t>(i)]) {
      const auto c = static_cast<Eigen::Index>(e.column);
      state.phi_pp.row(c) += e.value * cp.row(i);
      state.phi_pm.row(c) += e.value * cm.row(i);
    }
  }
  symmetrize(state.phi_pp);
  return state;
}

LowRankUpdate update_sketches(SketchState& state, const SparseVector& x_new) {
  const std::size_t mu = state.anchors.size();
  const Eigen::VectorXd psi = kernel_vector(state.kernel, x_new, state.anchors);
  const Eigen::VectorXd u = apply_sjlt_transpose(state.sjlt, mu, psi);
  const auto row = sjlt_row(state.sjlt, mu);
  const Eigen::VectorXd s = sjlt_row_dense(state.sjlt, mu);
  const double self = eval(state.kernel, x_new, x_new);

  const auto sm = static_cast<Eigen::Index>(state.sample.indices.size());
  Eigen::RowVectorXd psi_sampled(sm);
  for (Eigen::Index c = 0; c < sm; ++c) {
    psi_sampled(c) = psi(static_cast<Eigen::Index>(state.sample.indices[static_cast<std::size_t>(c)]));
  }

  for (const auto& e : row) {
    const auto c = static_cast<Eigen::Index>(e.column);
    state.phi_pm.row(c) += e.value * psi_sampled;
    state.phi_pp.row(c) += e.value * u.transpose();
    state.phi_pp.col(c) += e.value * u;
  }
  for (const auto& a : row) {
    for (const auto& b : row) {
      state.phi_pp(static_cast<Eigen::Index>(a.column), static_cast<Eigen::Index>(b.column)) +=
          self * a.value * b.value;
    }
  }
  symmetrize(state.phi_pp);
  state.anchors.push_back(x_new);

  LowRankUpdate update;
  const auto sp = static_cast<Eigen::Index>(state.sjlt.sketch_size);
  update.delta1.resize(sp, 3);
  update.delta2.resize(sp, 3);
  update.delta1 << s, u, s;
  update.delta2 << u, s, self * s;
  return update;
}

ProductPreservation product_preservation_stat(std::size_t sketch_size, std::size_t blocks,
                                              std::size_t trials, double delta,
                                              std::uint64_t seed) {
  if (trials < 100) throw ConfigError("product_preservation_stat needs at least 100 trials");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  SjltSpec spec{0, blocks, sketch_size};
  spec.validate();

  constexpr Eigen::Index rows = 64;
  constexpr Eigen::Index inner = 8;
  const double threshold = 1.0 / (delta * static_cast<double>(sketch_size));
  Rng rng(seed);
  std::vector<double> ratios;
  ratios.reserve(trials);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Eigen::MatrixXd a(rows, inner);
    Eigen::MatrixXd b(inner, rows);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
    spec.seed = rng.next();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(sketch_size));
    for (Eigen::Index i = 0; i < rows; ++i) s.row(i) = sjlt_row_dense(spec, static_cast<std::size_t>(i));
    const Eigen::MatrixXd bs = b * s;
    const double num = (b * a - bs * (s.transpose() * a)).squaredNorm();
    const double ratio = num / (2.0 * b.squaredNorm() * a.squaredNorm());
    ratios.push_back(ratio);
    if (ratio > threshold) ++failures;
  }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t mid = ratios.size() / 2;
  const double median = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
  return {static_cast<double>(failures) / static_cast<double>(trials), median};
}

}  // namespace forks
