#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "semibart/stats.hpp"

namespace semibart {

// Deterministic sampling layer used by everything in the library.
//
// Generator: std::mt19937_64 seeded with a single 64-bit word. Transforms are
// pinned here so streams are reproducible independent of the C++ runtime:
//   uniform01  ((word >> 11) + 0.5) * 2^-53, strictly inside (0,1)
//   normal     inverse CDF, normal_quantile(uniform01())
//   bernoulli  uniform01() < p
//   index      floor(uniform01() * n), clamped to n-1
//   gamma      Marsaglia-Tsang squeeze; shape < 1 boosted via U^(1/shape)
//   chi2       2 * gamma(df / 2)
// Truncated normals switch regime at a standardized bound of 4: inverse CDF
// on the complementary tail below it, exponential rejection above it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_quantile(uniform01()); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform draw from {0, ..., n-1}.
  int index(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::index: n must be positive");
    const int k = static_cast<int>(uniform01() * n);
    return k >= n ? n - 1 : k;
  }

  double exponential() { return -std::log(uniform01()); }

  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("Rng::gamma: shape must be positive");
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi2(double df) { return 2.0 * gamma(0.5 * df); }

  // Normal(mean, sd^2) conditioned on the draw exceeding `lower`.
  double trunc_normal_lower(double mean, double sd, double lower) {
    return mean + sd * std_trunc_lower((lower - mean) / sd);
  }

  // Normal(mean, sd^2) conditioned on the draw not exceeding `upper`.
  double trunc_normal_upper(double mean, double sd, double upper) {
    return mean - sd * std_trunc_lower((mean - upper) / sd);
  }

 private:
  // Standard normal conditioned on exceeding a.
  double std_trunc_lower(double a) {
    if (a < 4.0) {
      // P(Z > z) = tail * (1 - u) inverted through the upper tail keeps
      // precision when the untruncated CDF saturates near 1.
      const double tail = normal_cdf_upper(a);
      const double w = tail * (1.0 - uniform01());
      return -normal_quantile(w);
    }
    // Robert's exponential rejection for the far tail.
    const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
      const double x = a + exponential() / lambda;
      const double diff = x - lambda;
      if (uniform01() < std::exp(-0.5 * diff * diff)) return x;
    }
  }

  std::mt19937_64 gen_;
};

// SplitMix64 finalizer over base + stream * golden-gamma; child streams for
// distinct `stream` values are decorrelated and platform independent.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + stream * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace semibart
