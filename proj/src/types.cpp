#include "qsynth/types.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace qsynth {

int log2_exact(std::int64_t dim) {
  if (dim <= 0 || (dim & (dim - 1)) != 0) return -1;
  int k = 0;
  while ((std::int64_t{1} << k) < dim) ++k;
  return k;
}

namespace {

int checked_qubit_count(std::int64_t dim, int max_qubits, const char* what) {
  int n = log2_exact(dim);
  if (n < 0) {
    std::ostringstream msg;
    msg << what << ": dimension " << dim << " is not a power of two";
    throw std::invalid_argument(msg.str());
  }
  if (n > max_qubits) {
    std::ostringstream msg;
    msg << what << ": dimension " << dim << " exceeds the 2^" << max_qubits
        << " desk-scale cap";
    throw std::invalid_argument(msg.str());
  }
  return n;
}

}  // namespace

StateVector::StateVector(Vec amplitudes, const NumericPolicy& policy)
    : amps_(std::move(amplitudes)) {
  n_qubits_ = checked_qubit_count(amps_.size(), kMaxStateQubits, "StateVector");
  double norm = amps_.norm();
  if (std::abs(norm - 1.0) > policy.norm_tol) {
    std::ostringstream msg;
    msg << "StateVector: norm " << norm << " deviates from 1 beyond tolerance "
        << policy.norm_tol;
    throw std::invalid_argument(msg.str());
  }
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t index) {
  if (n_qubits < 0 || n_qubits > kMaxStateQubits)
    throw std::invalid_argument("basis_state: qubit count out of range");
  std::int64_t dim = std::int64_t{1} << n_qubits;
  if (static_cast<std::int64_t>(index) >= dim)
    throw std::invalid_argument("basis_state: index out of range");
  Vec v = Vec::Zero(dim);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(Mat entries, bool unnormalized,
                             const NumericPolicy& policy) {
  if (entries.rows() != entries.cols())
    throw std::invalid_argument("DensityMatrix: matrix is not square");
  n_qubits_ =
      checked_qubit_count(entries.rows(), kMaxDensityQubits, "DensityMatrix");
  double herm_residual = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (herm_residual > policy.norm_tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: Hermiticity residual " << herm_residual
        << " exceeds tolerance " << policy.norm_tol;
    throw std::invalid_argument(msg.str());
  }
  mat_ = 0.5 * (entries + entries.adjoint());
  unnormalized_ = unnormalized;
  if (!unnormalized) {
    double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > policy.norm_tol) {
      std::ostringstream msg;
      msg << "DensityMatrix: trace " << tr
          << " deviates from 1 beyond tolerance " << policy.norm_tol;
      throw std::invalid_argument(msg.str());
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(mat_,
                                            Eigen::EigenvaluesOnly);
  double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < policy.psd_floor) {
    std::ostringstream msg;
    msg << "DensityMatrix: eigenvalue " << min_eig
        << " below the PSD floor " << policy.psd_floor;
    throw std::invalid_argument(msg.str());
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  if (psi.n_qubits() > kMaxDensityQubits)
    throw std::invalid_argument(
        "DensityMatrix::from_pure: state exceeds the density-matrix cap");
  DensityMatrix rho;
  rho.mat_ = psi.amplitudes() * psi.amplitudes().adjoint();
  rho.n_qubits_ = psi.n_qubits();
  rho.unnormalized_ = false;
  return rho;
}

DensityMatrix DensityMatrix::trusted(Mat entries, bool unnormalized) {
  DensityMatrix rho;
  rho.mat_ = 0.5 * (entries + entries.adjoint());
  rho.n_qubits_ = checked_qubit_count(rho.mat_.rows(), kMaxDensityQubits,
                                      "DensityMatrix::trusted");
  rho.unnormalized_ = unnormalized;
  return rho;
}

UnitaryMatrix::UnitaryMatrix(Mat entries, const NumericPolicy& policy) {
  if (entries.rows() != entries.cols())
    throw std::invalid_argument("UnitaryMatrix: matrix is not square");
  n_qubits_ =
      checked_qubit_count(entries.rows(), kMaxStateQubits, "UnitaryMatrix");
  Mat residual = entries.adjoint() * entries;
  residual.diagonal().array() -= 1.0;
  double max_residual = residual.cwiseAbs().maxCoeff();
  if (max_residual > policy.unitary_tol) {
    std::ostringstream msg;
    msg << "UnitaryMatrix: unitarity residual " << max_residual
        << " exceeds tolerance " << policy.unitary_tol;
    throw std::invalid_argument(msg.str());
  }
  mat_ = std::move(entries);
}

UnitaryMatrix UnitaryMatrix::identity(int n_qubits) {
  if (n_qubits < 0 || n_qubits > kMaxStateQubits)
    throw std::invalid_argument("UnitaryMatrix::identity: qubit count out of range");
  std::int64_t dim = std::int64_t{1} << n_qubits;
  return trusted(Mat::Identity(dim, dim));
}

UnitaryMatrix UnitaryMatrix::trusted(Mat entries) {
  UnitaryMatrix u;
  u.n_qubits_ = checked_qubit_count(entries.rows(), kMaxStateQubits,
                                    "UnitaryMatrix::trusted");
  u.mat_ = std::move(entries);
  return u;
}

}  // namespace qsynth
