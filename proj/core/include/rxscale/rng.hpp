#pragma once

// Deterministic random number generation for simulation.
//
// Reproducibility contract: a trajectory is a pure function of its seed.
// Ensembles derive the seed for run i as base_seed ^ i, so results do not
// depend on thread count or scheduling.  All variate transforms are spelled
// out here (rather than using std:: distributions, whose output is
// implementation-defined) so that a seed produces the same trajectory
// everywhere.
//
// The generator is xoshiro256++ with splitmix64 state expansion.

#include <array>
#include <cmath>
#include <cstdint>

namespace rxscale {

class Rng {
 public:
  static Rng seeded(std::uint64_t seed) {
    Rng g;
    std::uint64_t x = seed;
    for (auto& w : g.s_) w = splitmix64(x);
    return g;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 usable bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate; strictly positive.
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Standard normal via the Marsaglia polar method.
  double normal() {
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double r = u * u + v * v;
      if (r > 0.0 && r < 1.0) return u * std::sqrt(-2.0 * std::log(r) / r);
    }
  }

  // Poisson variate.  Knuth's product method for small means, halving
  // recursion (Poisson additivity) above that; exact for all means.
  std::int64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) return poisson(mean / 2) + poisson(mean - mean / 2);
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  // Number of failures before success cutoff, P{k} = (1-r) r^k, k >= 0.
  std::int64_t geometric_failures(double r) {
    double u = 1.0 - uniform();  // in (0, 1]
    return static_cast<std::int64_t>(std::floor(std::log(u) / std::log(r)));
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> s_{};
};

// Seed for run `index` of an ensemble rooted at `base`.
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

}  // namespace rxscale
