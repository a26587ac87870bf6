#include "qsynth/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qsynth {

namespace {

// splitmix64; decorrelates (seed, stream_id) pairs before feeding the engine.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(mix64(mix64(seed) ^ mix64(~stream_id))),
      seed_(seed),
      stream_id_(stream_id) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Rejection sampling over the largest multiple of bound below 2^64.
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % bound;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // Box-Muller; u1 in (0, 1] keeps the log finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_gaussian_ = r * std::sin(theta);
  has_cached_gaussian_ = true;
  return r * std::cos(theta);
}

std::complex<double> RngStream::complex_gaussian() {
  double re = gaussian();
  double im = gaussian();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace qsynth
