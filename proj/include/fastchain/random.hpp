#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fastchain {

/// Explicit-seed generator used everywhere a random draw is needed. Draws are
/// derived from the raw 64-bit stream so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Independent stream for (seed, stream) pairs, e.g. one per Monte Carlo chunk.
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on (0, 1], 53 random bits.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform() - 0x1.0p-53); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  /// Exponential with the given rate, by inverse CDF.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  /// Flat Dirichlet draw of dimension n.
  std::vector<double> dirichlet(std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& v : w) {
      v = -std::log(uniform());
      s += v;
    }
    for (auto& v : w) v /= s;
    return w;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fastchain
