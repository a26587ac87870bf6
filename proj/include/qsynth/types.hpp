#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "qsynth/numeric.hpp"

namespace qsynth {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Desk-scale caps. Statevectors stay exact up to 12 qubits, density matrices
// up to 8; anything larger is rejected at construction instead of thrashing.
inline constexpr int kMaxStateQubits = 12;
inline constexpr int kMaxDensityQubits = 8;

// Returns log2(dim) if dim is a power of two, -1 otherwise.
int log2_exact(std::int64_t dim);

// n-qubit pure state. Unit norm within policy tolerance, enforced on
// construction.
class StateVector {
 public:
  explicit StateVector(Vec amplitudes,
                       const NumericPolicy& policy = default_policy());

  static StateVector basis_state(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return amps_.size(); }
  const Vec& amplitudes() const { return amps_; }
  cplx amplitude(std::uint64_t x) const { return amps_(static_cast<Eigen::Index>(x)); }

 private:
  Vec amps_;
  int n_qubits_;
};

// n-qubit mixed state. Hermitian and PSD within policy tolerance; trace 1
// unless constructed with unnormalized=true.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat entries, bool unnormalized = false,
                         const NumericPolicy& policy = default_policy());

  static DensityMatrix from_pure(const StateVector& psi);

  // Skips validation. For internal paths where the invariants hold by
  // construction (closed-form swap-test updates, partial traces of valid
  // states). The matrix is still Hermitized to keep roundoff symmetric.
  static DensityMatrix trusted(Mat entries, bool unnormalized = false);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return mat_.rows(); }
  const Mat& matrix() const { return mat_; }
  double trace() const { return mat_.trace().real(); }
  bool unnormalized() const { return unnormalized_; }

 private:
  DensityMatrix() = default;
  Mat mat_;
  int n_qubits_ = 0;
  bool unnormalized_ = false;
};

// Dense unitary on n qubits. Max-entry residual of U^dag U - I within policy
// tolerance.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Mat entries,
                         const NumericPolicy& policy = default_policy());

  static UnitaryMatrix identity(int n_qubits);
  // Skips the O(dim^3) unitarity check; for matrices unitary by construction.
  static UnitaryMatrix trusted(Mat entries);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return mat_.rows(); }
  const Mat& matrix() const { return mat_; }
  UnitaryMatrix adjoint() const { return trusted(mat_.adjoint()); }

 private:
  UnitaryMatrix() = default;
  Mat mat_;
  int n_qubits_ = 0;
};

}  // namespace qsynth
