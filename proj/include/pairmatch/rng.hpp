#pragma once

#include <cstdint>
#include <limits>

namespace pairmatch {

/// Counter-based generator with the SplitMix64 output function. Output k of
/// stream (seed, stream_id) is mix(key + (k + 1) * golden), where key itself
/// is a mix of seed and stream_id, so every (seed, stream_id) pair names an
/// independent, reproducible sequence without shared state.
///
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : key_(mix(mix(seed) ^ (stream_id * kGolden + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Jumps ahead by n outputs in O(1).
  void discard(std::uint64_t n) noexcept { counter_ += n; }

  std::uint64_t position() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace pairmatch
