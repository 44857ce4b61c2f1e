#pragma once

#include <cstdint>
#include <string_view>

namespace yt8m {

// Reproducible randomness. Every stream is a xoshiro256** generator whose
// 256-bit state is filled by SplitMix64 from a 64-bit seed. Streams are split
// by mixing a parent seed with a stable key (a node name hash, an epoch
// number, ...). The distributions below are implemented here rather than
// taken from <random> so that draws are identical across standard libraries.

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derive a child seed from a parent seed and a key.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept;

/// FNV-1a 64-bit, used to turn node names into stream keys.
std::uint64_t hash_name(std::string_view name) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, bound), bound > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace yt8m
