#pragma once

#include <cmath>
#include <cstdint>

namespace ip {

// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: every output is a pure function of (key, counter),
// so substreams can be split per task and arrays filled in parallel with no
// coordination, giving bitwise-identical results for any thread count.
//
// A given stream must be consumed either sequentially (uniform()/normal()) or
// by explicit index (*_at), never both; split() a fresh stream instead.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(derive_key(seed, stream)) {}

  CounterRng split(std::uint64_t stream) const noexcept {
    CounterRng r = *this;
    r.key_ = derive_key(key_, stream);
    r.counter_ = 0;
    return r;
  }

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t word_at(std::uint64_t ctr) const noexcept {
    return mix64(key_ + (ctr + 1) * kGamma);
  }

  // Uniform on [0, 1).
  double uniform_at(std::uint64_t ctr) const noexcept {
    return static_cast<double>(word_at(ctr) >> 11) * 0x1.0p-53;
  }

  // N(0,1) by Box-Muller; element idx consumes counters 2*idx and 2*idx+1.
  double normal_at(std::uint64_t idx) const noexcept {
    const double u1 =
        (static_cast<double>(word_at(2 * idx) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform_at(2 * idx + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  std::uint64_t next_u64() noexcept { return word_at(counter_++); }
  double uniform() noexcept { return uniform_at(counter_++); }

  double normal() noexcept {
    const std::uint64_t c = counter_;
    counter_ += 2;
    const double u1 =
        (static_cast<double>(word_at(c) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform_at(c + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Student t with df degrees of freedom (df >= 1); consumes 2*(df+1) counters.
  double student_t(int df) noexcept {
    const double z = normal();
    double v = 0.0;
    for (int i = 0; i < df; ++i) {
      const double g = normal();
      v += g * g;
    }
    return z / std::sqrt(v / static_cast<double>(df));
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr double kTwoPi = 6.283185307179586476925286766559;

  static std::uint64_t derive_key(std::uint64_t base,
                                  std::uint64_t stream) noexcept {
    return mix64(mix64(base ^ 0x9e6c63d0876a9ecdULL) + stream * kGamma);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ip
