#pragma once
// Deterministic randomness. Distributions are hand-rolled on top of
// mt19937_64 because the std::*_distribution algorithms are
// implementation-defined; experiment outputs must not change when the
// standard library does.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace wfp {

/// SplitMix64 step; used to derive independent seeds from a master seed.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless mix of a seed with a stream index.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
  return splitmix64(s);
}

/// FNV-1a over arbitrary bytes; keys bootstrap draws to row content.
inline uint64_t fnv1a(const void* data, std::size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t hash_row(std::span<const double> row, int32_t label) {
  uint64_t h = fnv1a(row.data(), row.size() * sizeof(double));
  return fnv1a(&label, sizeof(label), h);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  uint64_t uniform_int(uint64_t lo, uint64_t hi) {
    return lo + engine_() % (hi - lo + 1);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double lognormal(double log_mean, double log_sigma) {
    return std::exp(log_mean + log_sigma * normal());
  }

  /// Poisson(1) by inversion; bounded by the tiny tail past ~12.
  uint32_t poisson1() {
    double u = uniform();
    double p = std::exp(-1.0);
    double cdf = p;
    uint32_t n = 0;
    while (u >= cdf && n < 64) {
      ++n;
      p /= static_cast<double>(n);
      cdf += p;
    }
    return n;
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, i - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace wfp
