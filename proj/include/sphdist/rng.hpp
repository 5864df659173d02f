#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace sphdist {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for an independent sub-computation identified by `tag`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

/// Counter-based generator: the i-th output is a pure function of
/// (seed, stream, i), so any chunk of work can be regenerated in isolation.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sphdist
