#pragma once

namespace qsynth {

// Tolerances used by the validating constructors and consistency checks.
// A single object so experiments can tighten or relax every check at once.
struct NumericPolicy {
  double norm_tol = 1e-9;     // state norm, trace, Hermiticity residuals
  double unitary_tol = 1e-8;  // max-entry residual of U^dag U - I
  double psd_floor = -1e-9;   // smallest admissible density-matrix eigenvalue
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

}  // namespace qsynth
