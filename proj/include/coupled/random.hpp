#pragma once

#include <cstdint>
#include <limits>

// Counter-based randomness: every (seed, stream) pair names an independent
// SplitMix64 sequence, so results never depend on evaluation order.

namespace coupled {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Well-mixed 64-bit state for substream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(derive_seed(seed, stream));
}

/// Uniform double on the open interval (0, 1): a 52-bit grid offset by half
/// a step, so both ends are excluded exactly.
inline double uniform_open01(SplitMix64& rng) {
  return (static_cast<double>(rng() >> 12) + 0.5) * 0x1.0p-52;
}

/// Stream tags so independent consumers of one seed never collide.
enum class StreamTag : std::uint64_t {
  kSample = 1,
  kSdePath = 2,
  kPerturbation = 3,
  kComparator = 4,
};

inline std::uint64_t tagged_seed(std::uint64_t seed, StreamTag tag) {
  return derive_seed(seed, 0xa5a5a5a500000000ULL ^ static_cast<std::uint64_t>(tag));
}

}  // namespace coupled
