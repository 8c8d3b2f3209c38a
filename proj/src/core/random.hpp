#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace forks {

/// SplitMix64 finalizer. Used as a counter-based hash so that hash values can
/// be generated for any (seed, key) pair without keeping state.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

/// Seeded generator with platform-independent derived distributions.
///
/// The standard distribution adaptors (uniform_int_distribution,
/// normal_distribution, ...) are implementation-defined, so their output
/// differs between standard libraries. Every stream in this project must be
/// reproducible from its seed alone, so the few distributions needed are
/// derived here from the raw mt19937_64 sequence, which is fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n). n must be positive.
  std::size_t below(std::size_t n);

  /// Standard normal variate (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace forks
