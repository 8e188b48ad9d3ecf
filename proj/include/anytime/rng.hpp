#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

// Counter-based random number generation (Philox 4x32-10).
//
// A generator is addressed by a (seed, stream) pair. The seed forms the
// cipher key and the stream id occupies the high counter words, so two
// generators with the same seed and different streams produce
// non-overlapping output blocks. This is what makes per-path generators
// safe to create independently inside parallel Monte Carlo loops: path i
// uses stream i and never shares state with its neighbours.

namespace anytime {

namespace detail {

inline constexpr std::uint32_t philox_m0 = 0xD2511F53u;
inline constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
inline constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
inline constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

struct PhiloxBlock {
  std::uint32_t v[4];
};

inline PhiloxBlock philox4x32_10(std::uint32_t c0, std::uint32_t c1,
                                 std::uint32_t c2, std::uint32_t c3,
                                 std::uint32_t k0, std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(philox_m0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(philox_m1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += philox_w0;
    k1 += philox_w1;
  }
  return PhiloxBlock{{c0, c1, c2, c3}};
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint64_t next_u64() {
    if (word_pos_ >= 4) refill();
    const std::uint64_t lo = block_.v[word_pos_];
    const std::uint64_t hi = block_.v[word_pos_ + 1];
    word_pos_ += 2;
    return (hi << 32) | lo;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method; pairs are cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  double cauchy() {
    // tan is unbounded at the endpoints; uniform01 never returns 1 so only
    // u == 0.5 maps to a pole-free interior and u == 0 gives a finite tan.
    return std::tan(3.14159265358979323846 * (uniform01() - 0.5));
  }

  double student_t(int df) {
    if (df < 1) throw std::invalid_argument("student_t: df must be >= 1");
    double chi2 = 0.0;
    for (int i = 0; i < df; ++i) {
      const double z = normal();
      chi2 += z * z;
    }
    return normal() / std::sqrt(chi2 / static_cast<double>(df));
  }

 private:
  void refill() {
    block_ = detail::philox4x32_10(static_cast<std::uint32_t>(counter_),
                                   static_cast<std::uint32_t>(counter_ >> 32),
                                   stream_lo_, stream_hi_, key0_, key1_);
    ++counter_;
    word_pos_ = 0;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t counter_ = 0;
  detail::PhiloxBlock block_{};
  int word_pos_ = 4;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace anytime
