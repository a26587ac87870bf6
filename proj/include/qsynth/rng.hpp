#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qsynth {

// Seeded random stream. A (seed, stream_id) pair fully determines the draw
// sequence, so trial i of an experiment can use stream i and reproduce
// bit-for-bit regardless of scheduling. Gaussians use Box-Muller on top of
// the raw engine instead of std::normal_distribution, whose output is
// implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  // Uniform integer in [0, bound), rejection-sampled so every value has
  // exactly equal probability. bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  bool bernoulli(double p);
  // Standard normal N(0, 1).
  double gaussian();
  // Standard complex normal CN(0, 1): variance 1/2 per real component.
  std::complex<double> complex_gaussian();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace qsynth
