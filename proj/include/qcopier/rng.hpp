#pragma once

// Counter-based random stream: each (seed, stream) pair owns an independent
// SplitMix64 sequence, so trial i draws the same numbers whichever thread
// runs it.

#include <cstdint>
#include <limits>

namespace qcopier {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(splitmix64(seed) ^ splitmix64(~stream * 0xd1b54a32d192ed03ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// 0 or 1 with equal probability.
  int bit() { return static_cast<int>((*this)() >> 63); }

 private:
  std::uint64_t state_;
};

}  // namespace qcopier
