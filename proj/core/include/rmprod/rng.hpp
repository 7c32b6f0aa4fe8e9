#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every sampler in this library is a pure function of (parameters, seed):
// the 64-bit seed keys the generator, and a 64-bit stream word selects one
// of 2^64 independent streams, each 2^64 blocks long. Parallel trials draw
// from disjoint streams, so results never depend on scheduling order.
//
// Stream words are packed as [8-bit tag | 28-bit index a | 28-bit index b],
// which keeps streams collision-free by construction for every (tag, a, b)
// triple used in this codebase.

#include <array>
#include <cmath>
#include <cstdint>

namespace rmprod {

// Mixer used for deriving sub-seeds; never used as the main generator.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream word layout: [8-bit tag | 28-bit a | 28-bit b].
constexpr std::uint64_t substream(unsigned tag, std::uint64_t a = 0,
                                  std::uint64_t b = 0) noexcept {
  return (static_cast<std::uint64_t>(tag & 0xFFu) << 56) |
         ((a & 0xFFFFFFFull) << 28) | (b & 0xFFFFFFFull);
}

// Stable 64-bit sub-seed for a (master seed, stream word) pair. Used to hand
// independent full-strength seeds to per-trial or per-cell computations.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t stream_word) noexcept {
  return splitmix64(master + 0x9E3779B97F4A7C15ull * splitmix64(stream_word));
}

namespace streams {
inline constexpr unsigned gaussian_entries = 1;
inline constexpr unsigned haar_vector = 2;
inline constexpr unsigned haar_orthogonal = 3;
inline constexpr unsigned rotated_spectrum = 4;
inline constexpr unsigned rank_one = 5;
inline constexpr unsigned diagonal_bernoulli = 6;
inline constexpr unsigned product_step = 7;
inline constexpr unsigned stretch_trial = 8;
inline constexpr unsigned net_candidates = 9;
inline constexpr unsigned invariance_test = 10;
inline constexpr unsigned experiment_cell = 11;
inline constexpr unsigned experiment_trial = 12;
inline constexpr unsigned misc = 13;
}  // namespace streams

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11).
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t stream_word) noexcept
      : key_{static_cast<std::uint32_t>(key),
             static_cast<std::uint32_t>(key >> 32)},
        ctr_{0u, 0u, static_cast<std::uint32_t>(stream_word),
             static_cast<std::uint32_t>(stream_word >> 32)} {}

  std::uint32_t next_u32() noexcept {
    if (idx_ == 4) refill();
    return out_[idx_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method (spare value cached).
  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b,
                             std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    return static_cast<std::uint32_t>(p >> 32);
  }

  void refill() noexcept {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint32_t lo0, lo1;
      const std::uint32_t hi0 = mulhi(kM0, c0, lo0);
      const std::uint32_t hi1 = mulhi(kM1, c2, lo1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kW0;
      k1 += kW1;
    }
    out_ = {c0, c1, c2, c3};
    idx_ = 0;
    // 64-bit block counter over the low two counter words.
    if (++ctr_[0] == 0u) ++ctr_[1];
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> out_{};
  int idx_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmprod
