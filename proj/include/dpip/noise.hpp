#pragma once

#include <cstdint>
#include <random>

namespace dpip {

/// Seeded pseudo-random stream used by every randomized component.
///
/// The same 64-bit seed reproduces the exact same variate sequence, so any
/// protocol transcript is replayable from its seed. Uniform and Laplace
/// variates are derived from raw 64-bit draws with explicit bit
/// manipulation; behaviour is identical across platforms.
///
/// A NoiseSource is single-owner. Concurrent trials derive independent
/// child sources with split().
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1).
  double uniform01();

  /// Uniform on (0,1], as required by quantile queries.
  double uniform_open_closed();

  /// Uniform integer in [0, n). Requires n >= 1.
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p);

  /// Laplace(0, scale) via inverse CDF on a 64-bit uniform.
  double laplace(double scale);

  /// Independent child stream; deterministic in (seed, stream_index).
  NoiseSource split(std::uint64_t stream_index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 step, used for seed derivation and hashing small tuples.
std::uint64_t splitmix64(std::uint64_t& state);

/// Stateless mix of two words into one, for deriving child seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace dpip
