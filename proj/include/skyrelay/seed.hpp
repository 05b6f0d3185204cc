#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace skyrelay {

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text);

/// One SplitMix64 step (Steele, Lea, Flood): golden-ratio increment, then the finalizer. Bijective.
std::uint64_t mix64(std::uint64_t x);

/**
 * Splittable seed derivation.
 *
 * derive_seed(m, label, i) = mix64(mix64(mix64(m) ^ fnv1a64(label)) + mix64(i ^ C))
 * with C = 0x9e3779b97f4a7c15. Only fixed-width integer arithmetic is involved,
 * so the result is identical on every platform. Distinct labels or indices give
 * distinct streams with overwhelming probability, and the mapping does not
 * depend on the order in which streams are requested.
 */
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label, std::uint64_t index);

/// Random stream with the handful of draws the simulators need.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return unit_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exp(1): power gain of a Rayleigh-faded link.
    double exponential() { return exp_(engine_); }

    double normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }

    std::uint64_t poisson(double mean);

    /// Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

  private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::exponential_distribution<double> exp_{1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace skyrelay
