#pragma once

#include <cstdint>
#include <random>

namespace wcl {

/// Seeded random stream. Identical (seed, stream) pairs reproduce identical
/// draws; distinct stream ids give statistically independent sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent child stream, keyed by `sub` and this stream's identity.
  Rng derive(std::uint64_t sub) const;

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // N(0, 1)
  double normal(double mean, double sd);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace wcl
