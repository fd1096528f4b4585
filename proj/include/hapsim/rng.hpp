#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hapsim {

// All randomness in a run flows from one base seed through named substreams.
// Distributions are hand-derived from raw mt19937_64 output so that a
// (config, seed) pair reproduces bit-identically across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // 0..n-1, unbiased via rejection.
  int uniform_int(int n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return static_cast<int>(v % span);
  }

  template <typename T>
  const T& pick(std::span<const T> choices) {
    return choices[static_cast<std::size_t>(uniform_int(static_cast<int>(choices.size())))];
  }

  // Box-Muller, spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

  // Unit-mean exponential.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic substream derivation: stream ids are stable small constants
// per consumer (env, exploration, experiment cell, ...).
inline Rng make_rng(std::uint64_t base_seed, std::uint64_t stream) {
  return Rng(splitmix64(base_seed ^ splitmix64(stream)));
}

// Cumulative Zipf masses over ranks 1..n: P(rank) proportional to rank^-theta.
class ZipfSampler {
 public:
  ZipfSampler(int n, double theta) : cdf_(static_cast<std::size_t>(n)) {
    double acc = 0.0;
    for (int r = 1; r <= n; ++r) {
      acc += std::pow(static_cast<double>(r), -theta);
      cdf_[static_cast<std::size_t>(r - 1)] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }

  // Returns a rank in 1..n.
  int sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin()) + 1;
  }

  double mass(int rank) const {
    const auto i = static_cast<std::size_t>(rank - 1);
    return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace hapsim
