#pragma once

#include <optional>
#include <vector>

#include "qsynth/qcore.hpp"
#include "qsynth/rng.hpp"
#include "qsynth/types.hpp"

namespace qsynth {

enum class DistillMode {
  sampled,            // each swap test drawn Bernoulli(p_success)
  exact_conditional,  // condition on every test succeeding, track the probability
};

struct DistillationConfig {
  static constexpr int kAutoRounds = -1;

  int m = 0;                 // expected input count; 0 = take it from the inputs
  int rounds = kAutoRounds;  // kAutoRounds = auto_rounds(m, register qubits)
  DistillMode mode = DistillMode::sampled;

  // The baseline keeps the first register of a successful pair. The variant
  // used in the robustness analysis picks the kept index uniformly; the
  // reduced states coincide either way, only the index bookkeeping changes.
  bool keep_random_survivor = false;
};

// Default round count: the largest l with n_qubits * 6^l <= m (0 if m < n).
int auto_rounds(int m, int n_qubits);

// Diagnostics for one swap test inside a run.
struct PairOutcome {
  double parent1_overlap;
  double parent2_overlap;
  double child_overlap;
  double p_success;
  bool success;
};

struct DistillationReport {
  // survivor_counts[k] = registers alive after k rounds (entry 0 = m).
  std::vector<int> survivor_counts;
  // survivor_overlaps[k] = min overlap with the target among them; recorded
  // while at least one register survives.
  std::vector<double> survivor_overlaps;
  // Final survivors in register order, with their target overlaps and the
  // original input index each register carries.
  std::vector<DensityMatrix> survivor_states;
  std::vector<double> final_overlaps;
  std::vector<int> survivor_ids;
  // One entry per executed round.
  std::vector<std::vector<PairOutcome>> pair_log;
  // Probability that every performed test succeeds (exact_conditional mode;
  // stays 1 in sampled mode).
  double all_success_probability = 1.0;
  bool aborted = false;
};

// Pairwise swap-test distillation: each round tests registers (2j-1, 2j),
// keeps the shared survivor state of a successful pair at the next free
// slot, drops failed pairs, and passes an unpaired trailing register through
// untouched. aborted = true iff no register remains.
DistillationReport distill(const std::vector<DensityMatrix>& inputs,
                           const StateVector& target,
                           const DistillationConfig& config, RngStream& rng);

// Same procedure for pure inputs. Survivors are tracked on the span of their
// input lineage (a basis of input vectors plus a small coefficient matrix),
// so the cost stays near dim * rank instead of dim^2. Consumes rng in the
// same order as distill, so equal seeds give equal trajectories.
DistillationReport distill_pure(const std::vector<StateVector>& inputs,
                                const StateVector& target,
                                const DistillationConfig& config,
                                RngStream& rng);

struct ScalarDistillationReport {
  std::vector<int> survivor_counts;
  std::vector<double> survivor_overlaps;
  std::vector<double> final_overlaps;
  std::vector<int> survivor_ids;
  double all_success_probability = 1.0;
  bool aborted = false;
};

// Scalar model of the run for inputs sqrt(g_j) |tau> + sqrt(1-g_j) |e_j>
// with mutually orthogonal noise directions e_j. Merged survivors keep
// disjoint noise supports, so at every round the pair statistics depend only
// on the overlaps: p = (1 + g1 g2)/2 and the survivor overlap is
// (g1 + g2 + 2 g1 g2) / (2 (1 + g1 g2)), with no approximation. Requires an
// explicit round count. Consumes rng in the same order as distill.
ScalarDistillationReport distill_orthogonal(const std::vector<double>& overlaps,
                                            const DistillationConfig& config,
                                            RngStream& rng);

struct ConditionDiagnostics {
  double min_overlap;  // min_j |<psi_j|tau>|^2
  double max_cross;    // max_{i != j} |<psi_i| (I - |tau><tau|) |psi_j>|^2
};

ConditionDiagnostics check_conditions(const std::vector<StateVector>& inputs,
                                      const StateVector& target);

// Guaranteed final overlap after the given rounds when every input overlap
// is at least a: 1 - (1/2)(4/5)^(rounds - 2/a^2), clamped to [0, 1].
double overlap_bound(double a, int rounds);

// Abort-probability bound 2 exp(-n/12), valid when n >= 12 and m >= n (which
// makes m >= n 6^l automatic for l = auto_rounds(m, n)). Empty when the
// conditions fail.
std::optional<double> survival_bound(int m, int n);

// Writes each input as alpha |tau> + beta |phi> with |phi> unit and
// orthogonal to |tau>, orthonormalizes the noise vectors in input order, and
// returns per input the squared mass of its noise vector on the previously
// orthonormalized directions. Zero-noise inputs contribute no direction and
// get residual 0. When the largest pairwise squared noise overlap delta
// satisfies sqrt(delta) <= 1/(8m), residual_j <= (2j-1) delta is checked
// (j = 1-based position among the noisy inputs) and violations throw.
std::vector<double> gram_schmidt_diagnostic(
    const std::vector<StateVector>& inputs, const StateVector& target);

}  // namespace qsynth
