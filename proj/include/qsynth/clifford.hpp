#pragma once

#include <cstdint>
#include <vector>

#include "qsynth/types.hpp"

namespace qsynth {

// Signed Pauli word i^phase_exp * X^x Z^z with exact phase tracking.
// Qubit j acts on bit j of the basis index (bit 0 = least significant).
struct PauliOperator {
  int n_qubits = 0;
  std::uint64_t x_bits = 0;
  std::uint64_t z_bits = 0;
  std::uint8_t phase_exp = 0;  // power of i, 0..3

  static PauliOperator identity(int n_qubits);
  // Hermitian word with the given X/Z pattern: phase i^(x.z) times an
  // optional minus sign.
  static PauliOperator hermitian_word(int n_qubits, std::uint64_t x,
                                      std::uint64_t z, bool negative);

  PauliOperator multiply(const PauliOperator& rhs) const;  // this * rhs
  bool commutes_with(const PauliOperator& other) const;
  bool is_hermitian() const;

  Vec apply(const Vec& v) const;
  Mat to_matrix() const;
  bool equals(const PauliOperator& other) const;
};

// Clifford group element represented by the images U X_j U^dag and
// U Z_j U^dag (Hermitian signed Paulis). Valid images pairwise commute
// except each X image anticommutes with its own Z image.
class CliffordElement {
 public:
  CliffordElement(int n_qubits, std::vector<PauliOperator> x_images,
                  std::vector<PauliOperator> z_images);

  int n_qubits() const { return n_; }
  const PauliOperator& x_image(int j) const { return x_images_[j]; }
  const PauliOperator& z_image(int j) const { return z_images_[j]; }

  // U p U^dag via the tableau, exact phases included.
  PauliOperator conjugate(const PauliOperator& p) const;

  // Dense unitary with a deterministic global-phase convention (first
  // nonzero amplitude of U|0...0> is real positive). Column x is the product
  // of X images applied to that stabilizer state.
  Mat to_matrix() const;

 private:
  int n_;
  std::vector<PauliOperator> x_images_;
  std::vector<PauliOperator> z_images_;
};

}  // namespace qsynth
