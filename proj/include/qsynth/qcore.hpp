#pragma once

#include "qsynth/types.hpp"

namespace qsynth {

// |<a|b>|^2. Registers must have equal dimension.
double overlap(const StateVector& a, const StateVector& b);

// <tau|rho|tau>, real by Hermiticity.
double dm_overlap(const DensityMatrix& rho, const StateVector& tau);

StateVector apply_unitary(const UnitaryMatrix& u, const StateVector& psi);
DensityMatrix apply_unitary(const UnitaryMatrix& u, const DensityMatrix& rho);

StateVector tensor(const StateVector& a, const StateVector& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// Partial trace of a two-register joint state with factor dimensions
// (dim_a, dim_b), register 0 on the left. keep selects the surviving factor.
DensityMatrix partial_trace(const DensityMatrix& joint, std::int64_t dim_a,
                            std::int64_t dim_b, int keep);

// Equal-split partial trace; the joint dimension must be a perfect square.
DensityMatrix partial_trace_pair(const DensityMatrix& joint, int keep);

struct SwapTestOutcome {
  double p_success;        // probability the ancilla reads 0
  DensityMatrix survivor;  // post-success reduced state of either register
};

// Closed-form swap test on two equal-dimension registers:
//   p_success = (1 + tr(rho1 rho2)) / 2
//   survivor  = (rho1 + rho2 + rho1 rho2 + rho2 rho1) / (2 (1 + tr(rho1 rho2)))
// The post-success reduced states of the two registers coincide, so one
// survivor matrix describes both.
SwapTestOutcome swap_test_exact(const DensityMatrix& rho1,
                                const DensityMatrix& rho2);

}  // namespace qsynth
