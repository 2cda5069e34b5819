#pragma once

#include <cmath>
#include <cstdint>

namespace atsmem {

// SplitMix64: small, fast and fully specified, so seeded streams are
// bit-identical across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Independent stream for one trial of a seeded experiment.
inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 mix(seed ^ (0xd1b54a32d192ed03ULL * (trial + 1)));
  return SplitMix64(mix.next());
}

// Poisson variate by sequential inversion; `exp_neg_mean` is exp(-mean).
// Intended for the small per-trial means of photon counting.
inline std::uint64_t poisson_small(SplitMix64& rng, double mean, double exp_neg_mean) {
  const double u = rng.uniform();
  double p = exp_neg_mean;
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf && k < 100000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
    if (p == 0.0) break;
  }
  return k;
}

}  // namespace atsmem
