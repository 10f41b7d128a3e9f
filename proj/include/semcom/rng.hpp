#pragma once
// Deterministic, splittable randomness. Every consumer derives its own stream
// from (master seed, purpose, indices...), so draws never depend on
// evaluation order and running methods in any order replays identical
// environment randomness.

#include <cstdint>
#include <utility>

namespace semcom {

inline constexpr std::uint64_t kMix64Gamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += kMix64Gamma;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Uniform integer in [0, n), n >= 1.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // One Box-Muller pair of standard normals.
  std::pair<double, double> next_gauss_pair();

 private:
  std::uint64_t state_;
};

enum class StreamPurpose : std::uint64_t {
  MeanSnr = 1,
  Prompt,
  Priority,
  Fade,
  Outage,
  Explore,
  NetInit,
  Replay,
  Corpus,
};

inline std::uint64_t derive_key(std::uint64_t master, StreamPurpose purpose,
                                std::uint64_t a = 0, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
  std::uint64_t k = mix64(master + kMix64Gamma);
  k = mix64(k ^ (static_cast<std::uint64_t>(purpose) + kMix64Gamma));
  k = mix64(k ^ (a + kMix64Gamma));
  k = mix64(k ^ (b + kMix64Gamma));
  k = mix64(k ^ (c + kMix64Gamma));
  return k;
}

inline RngStream make_stream(std::uint64_t master, StreamPurpose purpose,
                             std::uint64_t a = 0, std::uint64_t b = 0,
                             std::uint64_t c = 0) {
  return RngStream(derive_key(master, purpose, a, b, c));
}

// FNV-1a over the raw bytes; stable across platforms and releases.
std::uint64_t fnv1a64(const void* data, std::size_t len);

}  // namespace semcom
