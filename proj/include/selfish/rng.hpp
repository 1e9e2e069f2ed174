#pragma once

#include <cmath>
#include <cstdint>

namespace selfish {

// SplitMix64 (Steele, Lea, Flood 2014). One 64-bit word of state, so world
// snapshots stay trivially serializable and trajectories reproduce across
// platforms. All derived draws (uniform, int, gaussian) are defined here in
// terms of next_u64() rather than the standard library's distributions,
// which are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 1) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // [0, n). Multiply-shift map of a full 64-bit draw; bias is < n / 2^64.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Box-Muller using two uniforms per call; no cached spare, so the state
  // remains a single word.
  double gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1], keeps log finite
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Independent child stream seeded from one parent draw.
  SplitMix64 split() { return SplitMix64(next_u64() ^ 0xA5A5A5A55A5A5A5AULL); }

  std::uint64_t state() const { return state_; }
  void set_state(std::uint64_t s) { state_ = s; }

  bool operator==(const SplitMix64&) const = default;

 private:
  std::uint64_t state_;
};

}  // namespace selfish
