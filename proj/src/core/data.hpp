#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kernel.hpp"

namespace forks {

struct Example {
  SparseVector x;
  int y = 1;  // -1 or +1

  bool operator==(const Example&) const = default;
};

struct Dataset {
  std::vector<Example> examples;
  std::size_t dim = 0;  // one past the largest 0-based feature index
  std::string name;

  std::size_t size() const noexcept { return examples.size(); }
};

/// Parses LIBSVM text ("label idx:val ..."; 1-based, strictly increasing
/// indices). Blank lines and '#' comments are skipped. Labels are mapped to
/// +-1: {-1,+1} as is, {0,1} with 0 -> -1, {1,2} with 2 -> -1.
/// Throws InputError naming the offending line.
Dataset parse_libsvm(std::string_view text, std::string name = {});

/// LIBSVM text with shortest round-trip number formatting.
std::string serialize_libsvm(const Dataset& ds);

/// Reads a LIBSVM file, gzip-compressed or plain. Throws IoError if the file
/// cannot be read, InputError if it does not parse.
Dataset load_libsvm(const std::string& path);

/// Throws IoError on write failure.
void save_libsvm(const Dataset& ds, const std::string& path);

/// Seeded Fisher-Yates shuffle.
Dataset permute(const Dataset& ds, std::uint64_t seed);

/// b blocks; block i repeats one uniformly drawn example r times, with the
/// label negated in every even-numbered block (1-based).
/// Throws ConfigError if b or r is zero, InputError if ds is empty.
Dataset adversarial_stream(const Dataset& ds, std::size_t blocks, std::size_t repeats,
                           std::uint64_t seed);

/// Per-feature affine map of the observed range (absent entries count as 0)
/// onto [lo, hi]. Constant features become 0.
Dataset minmax_scale(const Dataset& ds, double lo = -1.0, double hi = 1.0);

struct SyntheticData {
  Dataset dataset;
  Eigen::MatrixXd gram;
};

/// n Gaussian points on a random `rank`-dimensional subspace of R^d, labelled
/// by a random halfspace, with their exact Gaussian Gram matrix at bandwidth
/// `sigma`. Throws ConfigError unless 1 <= rank <= min(n, d).
SyntheticData synth_lowrank(std::size_t n, std::size_t d, std::size_t rank, double sigma,
                            std::uint64_t seed);

}  // namespace forks
