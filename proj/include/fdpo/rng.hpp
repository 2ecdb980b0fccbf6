#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fdpo {

/// SplitMix64 finalizer. Used to derive independent per-trial seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for stream `index` under `parent`. Streams for different indices
/// (or different parents) are statistically independent.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b);

/// Cross-platform-stable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so all
/// conversions to doubles and indices are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Beta(k, 1) via inverse CDF x^k.
  double beta_k1(double k);

  /// Index drawn from the distribution encoded by a cumulative vector whose
  /// last entry is the total mass.
  std::size_t categorical_cdf(std::span<const double> cdf);

  /// Index drawn from an (unnormalized) weight vector. O(n).
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fdpo
