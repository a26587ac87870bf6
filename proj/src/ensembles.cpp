#include "qsynth/ensembles.hpp"

#include <Eigen/QR>
#include <stdexcept>
#include <vector>

namespace qsynth {

Vec haar_vector(Eigen::Index dim, RngStream& rng) {
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
  double n = v.norm();
  if (n == 0.0) return haar_vector(dim, rng);
  return v / n;
}

StateVector haar_state(int n_qubits, RngStream& rng) {
  if (n_qubits < 1 || n_qubits > kMaxStateQubits)
    throw std::invalid_argument("haar_state: qubit count out of range");
  return StateVector(haar_vector(std::int64_t{1} << n_qubits, rng));
}

Mat haar_unitary_matrix(Eigen::Index dim, RngStream& rng) {
  Mat g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  // Fold the R-diagonal phases into Q; without this the distribution is
  // biased toward the QR gauge rather than Haar.
  Vec diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < dim; ++j) {
    double mag = std::abs(diag(j));
    cplx phase = (mag > 0.0) ? diag(j) / mag : cplx(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

UnitaryMatrix haar_unitary(int n_qubits, RngStream& rng) {
  if (n_qubits < 1 || n_qubits > kMaxStateQubits)
    throw std::invalid_argument("haar_unitary: qubit count out of range");
  return UnitaryMatrix::trusted(
      haar_unitary_matrix(std::int64_t{1} << n_qubits, rng));
}

namespace {

// GF(2) linear algebra on row vectors packed into uint64 (width <= 48 bits).
// Solves rows[i] . x = rhs[i]; returns a particular solution and a kernel
// basis via Gauss-Jordan elimination.
struct Gf2Solution {
  std::uint64_t particular = 0;
  std::vector<std::uint64_t> kernel;
};

Gf2Solution gf2_solve(std::vector<std::uint64_t> rows, std::vector<int> rhs,
                      int width) {
  std::vector<int> pivot_col_of_row(rows.size(), -1);
  std::vector<int> row_of_pivot_col(width, -1);
  std::size_t rank = 0;
  for (int col = 0; col < width && rank < rows.size(); ++col) {
    std::size_t found = rank;
    while (found < rows.size() && ((rows[found] >> col) & 1) == 0) ++found;
    if (found == rows.size()) continue;
    std::swap(rows[rank], rows[found]);
    std::swap(rhs[rank], rhs[found]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && ((rows[r] >> col) & 1)) {
        rows[r] ^= rows[rank];
        rhs[r] ^= rhs[rank];
      }
    }
    pivot_col_of_row[rank] = col;
    row_of_pivot_col[col] = static_cast<int>(rank);
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rhs[r]) throw std::logic_error("gf2_solve: inconsistent system");

  Gf2Solution sol;
  for (std::size_t r = 0; r < rank; ++r)
    if (rhs[r]) sol.particular |= std::uint64_t{1} << pivot_col_of_row[r];
  for (int col = 0; col < width; ++col) {
    if (row_of_pivot_col[col] >= 0) continue;
    std::uint64_t k = std::uint64_t{1} << col;
    for (std::size_t r = 0; r < rank; ++r)
      if ((rows[r] >> col) & 1) k |= std::uint64_t{1} << pivot_col_of_row[r];
    sol.kernel.push_back(k);
  }
  return sol;
}

std::uint64_t random_combination(const std::vector<std::uint64_t>& basis,
                                 RngStream& rng) {
  std::uint64_t out = 0;
  std::uint64_t bits = rng.next_u64();
  for (std::size_t i = 0; i < basis.size(); ++i)
    if ((bits >> i) & 1) out ^= basis[i];
  return out;
}

}  // namespace

CliffordElement random_clifford(int n_qubits, RngStream& rng) {
  if (n_qubits < 1 || n_qubits > kMaxStateQubits)
    throw std::invalid_argument("random_clifford: qubit count out of range");
  const int n = n_qubits;
  const int width = 2 * n;
  const std::uint64_t xmask = (std::uint64_t{1} << n) - 1;
  // Vector u encodes the word X^{u_x} Z^{u_z} with u_x in the low half.
  // The symplectic form <u, v> is u . swap_halves(v).
  auto swap_halves = [&](std::uint64_t u) {
    return ((u & xmask) << n) | (u >> n);
  };

  std::vector<std::uint64_t> constraints;
  std::vector<int> zeros;
  std::vector<PauliOperator> x_images, z_images;
  for (int j = 0; j < n; ++j) {
    Gf2Solution hom = gf2_solve(constraints, zeros, width);
    std::uint64_t v = 0;
    do {
      v = random_combination(hom.kernel, rng);
    } while (v == 0);

    std::vector<std::uint64_t> rows = constraints;
    std::vector<int> rhs = zeros;
    rows.push_back(swap_halves(v));
    rhs.push_back(1);
    Gf2Solution inhom = gf2_solve(rows, rhs, width);
    std::uint64_t w = inhom.particular ^ random_combination(inhom.kernel, rng);

    x_images.push_back(PauliOperator::hermitian_word(
        n, v & xmask, v >> n, rng.next_u64() & 1));
    z_images.push_back(PauliOperator::hermitian_word(
        n, w & xmask, w >> n, rng.next_u64() & 1));
    constraints.push_back(swap_halves(v));
    constraints.push_back(swap_halves(w));
    zeros.push_back(0);
    zeros.push_back(0);
  }
  return CliffordElement(n, std::move(x_images), std::move(z_images));
}

Mat random_twirl_matrix(int n_qubits, TwirlEnsemble ensemble, RngStream& rng) {
  if (ensemble == TwirlEnsemble::haar)
    return haar_unitary_matrix(std::int64_t{1} << n_qubits, rng);
  return random_clifford(n_qubits, rng).to_matrix();
}

}  // namespace qsynth
