#pragma once

#include <cstdint>
#include <vector>

#include "qsynth/rng.hpp"
#include "qsynth/types.hpp"

namespace qsynth {

// Lookup tables for a classical oracle that permutes basis states and
// attaches a fixed-point phase to each one.  The phase entries are ticks in
// units of 2*pi / 2^phase_bits, so every stored phase is exactly
// representable and the uncompute step can cancel it exactly.
struct PermPhaseOracle {
  int n_bits = 0;
  int phase_bits = 0;
  std::vector<int> sigma;
  std::vector<int> sigma_inverse;
  std::vector<std::uint64_t> phases;

  // Phase of entry x in radians, always in [0, 2*pi).
  double phase_value(int x) const;
};

// Pairs the k-th largest |u| entry with the k-th largest |v| entry and
// records the phase that rotates each u entry onto its partner, quantized
// to phase_bits.  Ties break by index; zero-amplitude entries get phase 0.
// Throws std::invalid_argument on length mismatch, non-unit input, a length
// that is not a power of two, or phase_bits outside [1, 62].
PermPhaseOracle build_perm_phase_oracle(const Vec& u, const Vec& v,
                                        int phase_bits);

// Runs the query / phase / uncompute chain on amplitudes u: each basis
// amplitude moves to its permuted slot and picks up the oracle phase.  The
// two ancilla registers (input index and phase ticks) are tracked exactly
// as integers; if the uncompute fails to return both to zero the oracle
// tables are inconsistent and this throws std::logic_error.
Vec apply_perm_phase(const Vec& u, const PermPhaseOracle& oracle);

struct TwoQueryResult {
  // First-register state conditioned on the padding qubits reading zero,
  // renormalized.
  StateVector output;
  // <target| rho |target> for rho the exact reduced state of the first
  // register (no conditioning on the padding qubits).
  double fidelity;
  // Overlap of the full expanded register with target (x) |0...0>; a lower
  // bound on `fidelity`.
  double expanded_fidelity = 0.0;
  // ||sort|u| - sort|v|||, the dominant error term.
  double sorted_distance = 0.0;
};

// Two-oracle-query synthesis: prepare u = U|0>, consult the oracle built
// against v = V (target (x) |0...0>), apply the permutation and phases,
// uncompute, and undo V.  This overload takes the twirl unitaries
// explicitly (test hooks and small dimensions); the rng overload samples
// them Haar-randomly.  Low fidelity is data, not an error.
TwoQueryResult two_query_synthesize(const StateVector& target,
                                    const UnitaryMatrix& u_twirl,
                                    const UnitaryMatrix& v_twirl,
                                    int phase_bits);
TwoQueryResult two_query_synthesize(const StateVector& target, int n_expanded,
                                    int phase_bits, RngStream& rng);

struct TwoQueryTrial {
  double sorted_distance = 0.0;
  // ||r - v||^2 for r the reconstructed amplitude vector.
  double distance2 = 0.0;
  // |<v|r>|^2.  The full pipeline's reduced-state fidelity is at least
  // this, so the figure is conservative.
  double fidelity = 0.0;
};

// Statistics path: u and v are sampled directly as independent Haar unit
// vectors, which is exactly the law they inherit from Haar U, V (the
// pipeline touches the unitaries only through u = U|0> and v = V tau').
// Avoids dense unitary sampling, so large dimensions stay cheap.
TwoQueryTrial two_query_sampled_trial(int n_bits, int phase_bits,
                                      RngStream& rng);

// Euclidean distance between the descending-sorted entrywise magnitudes.
// Position information is deliberately erased.
double sorted_abs_distance(const Vec& u, const Vec& v);

enum class ReferenceLaw { rayleigh };

// Magnitude of a standard complex Gaussian: density 2r exp(-r^2) on r >= 0.
inline constexpr double kRayleighMean = 0.8862269254527580;      // sqrt(pi)/2
inline constexpr double kRayleighVariance = 0.2146018366025517;  // (4-pi)/4

// Inverse CDF of that law: sqrt(-ln(1-p)).  Requires p in [0, 1).
double rayleigh_quantile(double p);

// 2-Wasserstein distance between the empirical measure of the samples and
// the reference law, by the midpoint quantile rule: the i-th order
// statistic couples to the reference quantile at (i + 1/2) / n.
double empirical_wasserstein2(const std::vector<double>& samples,
                              ReferenceLaw reference);

}  // namespace qsynth
