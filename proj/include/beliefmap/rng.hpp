#pragma once

#include <cstdint>

namespace beliefmap {

// SplitMix64. Chosen because it is tiny, seedable, and produces the same
// stream on every platform, so generated corpora and golden files never
// depend on the standard library's distribution internals.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Value in [0, bound); bound > 0. Modulo bias is irrelevant at the bounds
  // used here (vocabulary weight sums, well below 2^32).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

}  // namespace beliefmap
