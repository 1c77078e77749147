#pragma once

#include <cstdint>
#include <random>

namespace beliefsim {

/// Deterministic random stream for one simulation replication.
///
/// Wraps std::mt19937_64 (bit-exact by the standard) and derives doubles and
/// indices directly from raw 64-bit outputs, so sequences are reproducible
/// across standard libraries — std::uniform_*_distribution makes no such
/// guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1), 53 bits of entropy.
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t pick_index(std::size_t n) {
    auto idx = static_cast<std::size_t>(next_double() * static_cast<double>(n));
    return idx < n ? idx : n - 1;
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace beliefsim
