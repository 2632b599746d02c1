#pragma once

#include <cmath>
#include <cstdint>

namespace fresh {

// splitmix64, used for seed expansion and stream derivation.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// Deterministic sub-stream seed for (master, tag); tags never collide across
// arrival / selection / per-content streams by construction.
inline uint64_t derive_seed(uint64_t master, uint64_t tag) {
  SplitMix64 sm(master ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
  return sm.next();
}

// xoshiro256** with hand-rolled samplers so runs are bit-reproducible across
// standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in [0, 1)
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

  // Exact Poisson sample: product-of-uniforms for small means, Hormann's
  // PTRS transformed rejection for large means.
  long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) return poisson_small(mean);
    return poisson_ptrs(mean);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  long poisson_small(double mean) {
    const double limit = std::exp(-mean);
    double prod = u01();
    long k = 0;
    while (prod > limit) {
      prod *= u01();
      ++k;
    }
    return k;
  }

  long poisson_ptrs(double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = u01() - 0.5;
      const double v = u01();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const double k = kf;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * loglam - mean - std::lgamma(k + 1.0)) {
        return static_cast<long>(kf);
      }
    }
  }

  uint64_t s_[4];
};

}  // namespace fresh
