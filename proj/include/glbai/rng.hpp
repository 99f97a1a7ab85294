#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace glbai {

/// Named random streams of a run. Each gets an independent generator derived
/// from (seed, stream), so e.g. the instance of a replication does not depend
/// on how many rewards were drawn.
enum class Stream : std::uint64_t { Instance = 1, Reward = 2, Algorithm = 3 };

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// std::mt19937_64 with hand-written variate transforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
  Rng(std::uint64_t seed, Stream stream)
      : engine_(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n), by rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Poisson(mean) by sequential inversion; means above 500 use the rounded
  /// normal approximation.
  std::uint64_t poisson(double mean) {
    if (!(mean > 0)) return 0;
    if (mean > 500.0) {
      const double v = std::round(mean + std::sqrt(mean) * normal());
      return v > 0 ? static_cast<std::uint64_t>(v) : 0;
    }
    const double u = uniform();
    double pmf = std::exp(-mean);
    double cdf = pmf;
    std::uint64_t k = 0;
    while (u >= cdf && pmf > 0) {
      ++k;
      pmf *= mean / static_cast<double>(k);
      cdf += pmf;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0;
};

}  // namespace glbai
