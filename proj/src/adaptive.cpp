#include "qsynth/adaptive.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qsynth {

namespace {

// Round p in [0,1] to the nearest multiple of 2^-bits, halves away from zero.
double round_dyadic(double p, int bits) {
  double scale = std::ldexp(1.0, bits);
  return static_cast<double>(std::llround(p * scale)) / scale;
}

}  // namespace

AdaptiveResult synthesize_adaptive(const StateVector& target,
                                   const PrecisionPolicy& policy) {
  if (!policy.exact) {
    if (policy.prob_bits < 1 || policy.prob_bits > 62 ||
        policy.phase_bits < 1 || policy.phase_bits > 62) {
      throw std::invalid_argument(
          "precision bits must lie in [1, 62] unless exact mode is set");
    }
  }
  const int n = target.n_qubits();
  const std::int64_t dim = target.dim();
  const Vec& amps = target.amplitudes();

  // Squared magnitudes of the target; these drive every conditional query.
  std::vector<double> prob(dim);
  for (std::int64_t x = 0; x < dim; ++x) prob[x] = std::norm(amps(x));

  // Stage k refines prefixes of length k into length k+1, most significant
  // bit first. mags[y] is the magnitude assigned to prefix y so far.
  std::vector<double> mags{1.0};
  for (int k = 0; k < n; ++k) {
    std::int64_t half = dim >> (k + 1);
    std::vector<double> next_mags(mags.size() * 2);
    for (std::size_t y = 0; y < mags.size(); ++y) {
      std::int64_t base = static_cast<std::int64_t>(y) << (n - k);
      double p_low = 0.0;
      double p_all = 0.0;
      for (std::int64_t x = 0; x < half; ++x) p_low += prob[base + x];
      for (std::int64_t x = 0; x < 2 * half; ++x) p_all += prob[base + x];
      // Conditional probability of the next bit being 0 given the prefix.
      // A prefix the target never visits gets the uninformative split.
      double c0 = p_all > 0.0 ? p_low / p_all : 0.5;
      double p0 = c0;
      double p1 = 1.0 - c0;
      if (!policy.exact) {
        p0 = round_dyadic(p0, policy.prob_bits);
        p1 = round_dyadic(p1, policy.prob_bits);
      }
      double s = p0 + p1;
      if (s <= 0.0) {
        p0 = 0.5;
        p1 = 0.5;
        s = 1.0;
      }
      next_mags[2 * y] = mags[y] * std::sqrt(p0 / s);
      next_mags[2 * y + 1] = mags[y] * std::sqrt(p1 / s);
    }
    mags.swap(next_mags);
  }

  // Phase pass: attach each amplitude's argument on the grid.
  Vec out(dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    double theta = std::arg(amps(x));
    if (theta < 0.0) theta += 2.0 * M_PI;
    if (!policy.exact) {
      double scale = std::ldexp(1.0, policy.phase_bits);
      theta = 2.0 * M_PI *
              (static_cast<double>(std::llround(theta / (2.0 * M_PI) * scale)) /
               scale);
    }
    out(x) = std::polar(mags[x], theta);
  }
  double nrm = out.norm();
  if (nrm <= 0.0) {
    throw std::logic_error("adaptive synthesis produced the zero vector");
  }
  out /= nrm;

  // One amplitude query and one phase query per qubit level, plus the final
  // global pair.
  return AdaptiveResult{StateVector(out), 2 * n + 2};
}

}  // namespace qsynth
