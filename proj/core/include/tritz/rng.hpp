#pragma once

#include <cstdint>

namespace tritz {

// SplitMix64 generator. Used instead of <random> engines so that seeded
// streams are bit-identical across standard library implementations.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [-0.5, 0.5).
  double next_centered() { return next_double() - 0.5; }

private:
  std::uint64_t state_;
};

// Derives an independent sub-stream seed from a base seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 rng(base ^ (0xA076'1D64'78BD'642FULL * (stream + 1)));
  return rng.next();
}

}  // namespace tritz
