#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace mdcv {

/// SplitMix64 finalizer; a bijective 64-bit mixing function.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derives a child seed from a parent seed and a stream tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

/// FNV-1a over the bytes of `text`; stable across platforms.
std::uint64_t hash_text(std::string_view text) noexcept;

// Distributions are implemented here rather than taken from <random> so
// that draws are identical across standard library implementations; only
// the mt19937_64 engine (whose output is fully specified) is borrowed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer on [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  /// Standard normal via the Marsaglia polar method.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mdcv
