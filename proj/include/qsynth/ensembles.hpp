#pragma once

#include "qsynth/clifford.hpp"
#include "qsynth/rng.hpp"
#include "qsynth/types.hpp"

namespace qsynth {

// Haar-random pure state: iid complex Gaussian amplitudes, normalized.
Vec haar_vector(Eigen::Index dim, RngStream& rng);
StateVector haar_state(int n_qubits, RngStream& rng);

// Haar-random unitary: complex Ginibre matrix, QR decomposition, R-diagonal
// phases folded into Q so the distribution is exactly Haar.
Mat haar_unitary_matrix(Eigen::Index dim, RngStream& rng);
UnitaryMatrix haar_unitary(int n_qubits, RngStream& rng);

// Exactly uniform Clifford group element (modulo global phase): a uniformly
// random symplectic basis of F_2^{2n} assembled pair by pair (each X image
// drawn uniformly from the symplectic complement of the prior pairs, each Z
// image uniformly from the affine set pairing with it), plus 2n uniform sign
// bits.
CliffordElement random_clifford(int n_qubits, RngStream& rng);

// Sites that twirl by a random Clifford can swap in a Haar unitary (also a
// 2-design) for cross-validation.
enum class TwirlEnsemble { clifford, haar };

Mat random_twirl_matrix(int n_qubits, TwirlEnsemble ensemble, RngStream& rng);

}  // namespace qsynth
