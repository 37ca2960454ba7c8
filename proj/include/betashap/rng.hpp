#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace betashap {

// Random streams used throughout the library.
//
// All randomness derives from a 64-bit seed. Sub-streams are keyed by a
// label and/or integer counters through the SplitMix64 finalizer, so a draw
// depends only on (seed, key) and never on execution order.
//
// Generator: xoshiro256** seeded with four SplitMix64 outputs.
// Uniform double: top 53 bits of a 64-bit output times 2^-53, in [0, 1).
// Bounded integers: Lemire's multiply-shift with rejection (unbiased).
// Normal variates: Box-Muller on (u1, u2) with u1 = 1 - uniform() in (0, 1];
// the cosine branch is returned first and the sine branch is cached for the
// next call.

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a label.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Derives a child seed from a parent seed and a text label.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return mix64(seed ^ mix64(hash_label(label)));
}

/// Derives a child seed from a parent seed and a sequence of counters.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t c : counters) h = mix64(h ^ mix64(c + 0x632BE59BD9B4E019ULL));
  return h;
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  /// Uniform in [0, 1).
  double uniform() noexcept;
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Fills the first `count` entries of `pool` with a uniform random subset of
/// its elements (partial Fisher-Yates). Order of the chosen prefix is random.
void partial_shuffle(Rng& rng, std::span<std::size_t> pool, std::size_t count) noexcept;

}  // namespace betashap
