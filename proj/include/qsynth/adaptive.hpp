#pragma once

#include "qsynth/types.hpp"

namespace qsynth {

// Precision model for the adaptive baseline: conditional probabilities are
// rounded to multiples of 2^-prob_bits, phases to multiples of
// 2 pi / 2^phase_bits. exact = true disables rounding entirely.
struct PrecisionPolicy {
  int prob_bits = 24;
  int phase_bits = 24;
  bool exact = false;

  static PrecisionPolicy exact_policy() { return {0, 0, true}; }
};

struct AdaptiveResult {
  StateVector output;
  int query_count;  // always 2n + 2: two queries per stage pass, two for phases
};

// Stage-by-stage synthesis from conditional-probability queries: stage k
// extends each k-bit prefix (most significant bits first) by the rounded
// conditional pair, renormalized onto the unit sphere; a final pass applies
// rounded phases. Prefixes with zero probability extend by (1/2, 1/2).
AdaptiveResult synthesize_adaptive(const StateVector& target,
                                   const PrecisionPolicy& policy);

}  // namespace qsynth
