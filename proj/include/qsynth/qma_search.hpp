#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsynth/clifford.hpp"
#include "qsynth/phase_states.hpp"
#include "qsynth/rng.hpp"
#include "qsynth/types.hpp"

namespace qsynth {

// One local term: a Hermitian block acting on a strictly ascending list of
// qubit indices. Qubit 0 is the most significant index bit (tensor order),
// and the first listed qubit is the most significant block bit.
struct HamiltonianTerm {
  std::vector<int> qubits;
  Mat block;
};

// Sum of local terms with decision thresholds a < b. `normalized` records
// that the spectrum has been placed inside [0, 1]; `degenerate` flags the
// zero-operator case where normalization had nothing to scale.
struct LocalHamiltonian {
  int n_qubits = 0;
  int locality = 0;  // declared k; every term acts on at most k qubits
  std::vector<HamiltonianTerm> terms;
  double a = 0.0;
  double b = 0.0;
  bool normalized = false;
  bool degenerate = false;
};

// Structural checks: qubit lists strictly ascending and in range, block
// dimensions 2^j x 2^j and Hermitian, locality respected, b > a, and the
// dense-analysis cap n_qubits <= kMaxDensityQubits. Throws invalid_argument.
void validate_hamiltonian(const LocalHamiltonian& h,
                          const NumericPolicy& policy = default_policy());

// Dense 2^n x 2^n matrix of the full operator.
Mat hamiltonian_matrix(const LocalHamiltonian& h);

// Expectation value <state|H|state> (real part; H is Hermitian).
double hamiltonian_energy(const LocalHamiltonian& h, const StateVector& state);

// Affine map placing the spectrum inside [0, 1]: shift up if the bottom
// eigenvalue is negative, then scale down if the top exceeds one. The shift
// folds into the first term's block, the scale multiplies every block, and
// the thresholds a, b move through the same map. An operator already inside
// [0, 1] comes back unchanged apart from the `normalized` flag; the zero
// operator only gets the `degenerate` flag set.
LocalHamiltonian normalize_hamiltonian(const LocalHamiltonian& h);

// Smallest p >= 1 with (1 - delta/4)^(2p) <= delta / 2^(n+1), the exponent
// that concentrates (1-H)^p onto the low-energy subspace.
std::int64_t filter_exponent(int n_qubits, double delta);

// Dense repeated-squaring powering of (1 - H) is allowed up to this
// exponent; beyond it the spectral route in filtered_seed_state takes over.
inline constexpr std::int64_t kFilterPowerCap = std::int64_t{1} << 20;

// Normalized (1-H)^p D|0^n>. Uses dense repeated squaring for
// p <= kFilterPowerCap and eigenbasis powering beyond that, carried in log
// space relative to the dominant surviving branch so the direction stays
// correct even when the absolute norm underflows. Errors only when the
// filter kills every branch the seed touches. Requires a normalized
// Hamiltonian.
Vec filtered_seed_state(const LocalHamiltonian& h, const Mat& d_matrix,
                        std::int64_t p);

// Sign oracle of the real part of C (1-H)^p D |0^n>: f(x) = 1 exactly where
// that amplitude is negative (zeros count as +). Dense repeated squaring;
// p above kFilterPowerCap is an error, use qma_exp_search's spectral route.
// Requires a normalized Hamiltonian.
PhaseOracle qma_oracle_fn(const LocalHamiltonian& h, const CliffordElement& c,
                          const CliffordElement& d, std::int64_t p);
PhaseOracle qma_oracle_fn(const LocalHamiltonian& h, const Mat& c_matrix,
                          const Mat& d_matrix, std::int64_t p);

// Register width of the idealized energy readout for gap delta:
// ceil(log2(1/delta)) + 5 bits.
int energy_estimate_bits(double delta);

// Gate threshold a + (b-a)/4 + eps with eps = 2 * 2^-m_bits.
double acceptance_threshold(const LocalHamiltonian& h, int m_bits);

struct EnergyEstimateResult {
  double theta = 0.0;      // reading on the grid {j / 2^m_bits}; j may be -1
  StateVector post_state;  // renormalized projection consistent with theta
  bool accepted = false;   // theta <= acceptance_threshold(h, m_bits)
};

// Idealized energy readout. Samples an eigenbranch of H by the Born rule;
// within the branch with energy E the reading is floor(2^m E) / 2^m with
// probability frac(2^m E) and one tick lower otherwise, except that an
// energy exactly on the grid reads exactly, with probability one. The
// post-state is the renormalized projection of the input onto every
// eigenvector that could have produced the reading. Requires a normalized
// Hamiltonian and 1 <= m_bits <= 40.
EnergyEstimateResult energy_estimate(const StateVector& state,
                                     const LocalHamiltonian& h, int m_bits,
                                     RngStream& rng);

// Total squared overlap of the state with eigenvectors of energy <= cutoff.
double low_energy_mass(const StateVector& state, const LocalHamiltonian& h,
                       double cutoff);

struct QmaSearchResult {
  bool aborted = true;
  StateVector candidate;  // state entering the measurement gate
  double theta = 0.0;     // energy reading at the gate
  std::optional<StateVector> witness;  // post-state when accepted
  double witness_energy = 0.0;         // <H> of witness; 0 when aborted
};

// One-query witness search: sample independent uniform Cliffords C and D,
// build the sign oracle of C (1-H)^p D |0^n> at p = filter_exponent, take
// C^dag applied to its phase state, and gate it on the energy readout with
// m = energy_estimate_bits(b - a). Accepts (returning the post-state as the
// witness) or aborts. Normalizes the Hamiltonian internally.
QmaSearchResult qma_search_one_query(const LocalHamiltonian& h,
                                     RngStream& rng);

struct QmaExpResult {
  StateVector output;             // C^dag applied to the phase state
  double filtered_overlap = 0.0;  // |<seed|output>|^2, seed = filtered D|0>
  double filtered_energy = 0.0;   // <H> of that filtered seed
  // False when the filter annihilated D|0> outright (every populated branch
  // at eigenvalue 1). The output state still exists; the run just counts as
  // a miss: overlap 0, energy NaN.
  bool filter_survived = true;
};

// Gate-free variant: same construction as qma_search_one_query up to the
// measurement gate, but the candidate is returned unconditionally and no
// energy readout runs, so exponents beyond kFilterPowerCap are fine via the
// spectral route. Under a shared stream the output equals the one-query
// candidate bit for bit whenever the dense route is in play.
QmaExpResult qma_exp_search(const LocalHamiltonian& h, RngStream& rng);

// Parallel repetition: up to `repetitions` independent one-query runs on
// streams (seed, base_stream + i); the first accepting result wins.
std::optional<QmaSearchResult> qma_search_repeat(const LocalHamiltonian& h,
                                                 int repetitions,
                                                 std::uint64_t seed,
                                                 std::uint64_t base_stream = 0);

// Text format, one operator per stream:
//   line 1:  n k a b
//   then one term per line:  q1,...,qj : 4^j row-major entries, each re+imj
// Blank lines are ignored. Malformed input is a hard error naming the line.
LocalHamiltonian parse_hamiltonian(std::istream& in);
LocalHamiltonian parse_hamiltonian_text(const std::string& text);
std::string write_hamiltonian(const LocalHamiltonian& h);

}  // namespace qsynth
