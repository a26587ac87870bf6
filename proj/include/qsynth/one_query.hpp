#pragma once

#include <optional>

#include "qsynth/distill.hpp"
#include "qsynth/rng.hpp"
#include "qsynth/types.hpp"

namespace qsynth {

struct OneQueryConfig {
  int n_target = 0;
  // Working register size; 0 means n_target + 4. Padding qubits trade oracle
  // width for single-register overlap concentration.
  int n_expanded = 0;
  int m = 96;  // register count fed to distillation
  std::uint64_t seed = 0;
  // Draw and apply Haar matrices register by register instead of sampling
  // the register law directly (slow; used for cross-validation).
  bool explicit_unitaries = false;
  // Test hook: skip the twirl entirely (U = I for every register).
  bool identity_hook = false;
  // rounds defaults to auto_rounds(m, n_expanded); mode defaults to sampled.
  DistillationConfig distill;
};

struct OneQueryResult {
  bool aborted = false;
  std::optional<DensityMatrix> output;  // reduced to n_target qubits
  double output_overlap = 0.0;    // output vs target (0 when aborted)
  double expanded_overlap = 0.0;  // first survivor vs padded target
  double mean_register_overlap = 0.0;
  ConditionDiagnostics conditions{0.0, 0.0};
  DistillationReport distillation;
};

// target ⊗ |0...0> on n_expanded qubits total.
StateVector expand_target(const StateVector& target, int n_expanded);

// One register preparation: twirl by U, query the sign oracle of the twirled
// target, untwirl. Returns U^dagger |p_f> for f(x) = [Re <x|U|target> < 0].
StateVector one_query_register(const StateVector& target_expanded,
                               const UnitaryMatrix& u);

// Same register distribution without materializing U. For Haar U the
// twirled target w = U|target'> is itself a Haar state, the oracle depends
// only on w, and conditioned on w the untwirled remainder is Haar in the
// orthogonal complement of the target:
//   U^dagger |p_f> = c |target'> + sqrt(1 - |c|^2) |g>,  c = <w|p_f>,
// with g Haar-uniform on the complement sphere, independent of c.
StateVector one_query_register_sampled(const StateVector& target_expanded,
                                       RngStream& rng);

// Full pipeline: pad the target, prepare m registers (register j draws from
// RngStream(seed, j), so preparations are independent and order-free),
// distill survivors (stream id m), and reduce the first survivor back to
// n_target qubits. Aborting is a reported outcome, not an error.
OneQueryResult one_query_synthesize(const StateVector& target,
                                    const OneQueryConfig& config);

}  // namespace qsynth
