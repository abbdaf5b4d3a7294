#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace kinorrt {

// Deterministic random helpers. The raw mt19937_64 stream is pinned by the
// standard; distribution shaping happens here rather than through
// std::*_distribution so outputs are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    using u128 = unsigned __int128;
    // Lemire multiply-shift with rejection of the biased band.
    std::uint64_t x = gen_();
    u128 m = static_cast<u128>(x) * static_cast<u128>(n);
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = gen_();
        m = static_cast<u128>(x) * static_cast<u128>(n);
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Box-Muller; the spare deviate is cached.
  double normal(double mean, double sd) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + sd * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return mean + sd * r * std::cos(a);
  }

  // Normal truncated to [lo, hi] by rejection; falls back to clamping the
  // mean if the window is never hit (degenerately narrow bounds).
  double truncated_normal(double mean, double sd, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("truncated_normal: lo > hi");
    for (int i = 0; i < 256; ++i) {
      const double v = normal(mean, sd);
      if (v >= lo && v <= hi) return v;
    }
    return std::min(std::max(mean, lo), hi);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream seed for worker `index` under `master`. Used wherever work fans out
// so results do not depend on the worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

}  // namespace kinorrt
