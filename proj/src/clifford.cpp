#include "qsynth/clifford.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qsynth {

namespace {

int parity64(std::uint64_t v) { return std::popcount(v) & 1; }

cplx i_power(std::uint8_t p) {
  switch (p & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

PauliOperator PauliOperator::identity(int n_qubits) {
  return PauliOperator{n_qubits, 0, 0, 0};
}

PauliOperator PauliOperator::hermitian_word(int n_qubits, std::uint64_t x,
                                            std::uint64_t z, bool negative) {
  std::uint8_t phase = static_cast<std::uint8_t>(
      (parity64(x & z) + (negative ? 2 : 0)) & 3);
  return PauliOperator{n_qubits, x, z, phase};
}

PauliOperator PauliOperator::multiply(const PauliOperator& rhs) const {
  if (n_qubits != rhs.n_qubits)
    throw std::invalid_argument("PauliOperator::multiply: qubit count mismatch");
  // Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1.
  std::uint8_t phase = static_cast<std::uint8_t>(
      (phase_exp + rhs.phase_exp + 2 * parity64(z_bits & rhs.x_bits)) & 3);
  return PauliOperator{n_qubits, x_bits ^ rhs.x_bits, z_bits ^ rhs.z_bits,
                       phase};
}

bool PauliOperator::commutes_with(const PauliOperator& other) const {
  return parity64(x_bits & other.z_bits) == parity64(z_bits & other.x_bits);
}

bool PauliOperator::is_hermitian() const {
  return (phase_exp & 1) == (parity64(x_bits & z_bits) & 1);
}

Vec PauliOperator::apply(const Vec& v) const {
  std::int64_t dim = std::int64_t{1} << n_qubits;
  if (v.size() != dim)
    throw std::invalid_argument("PauliOperator::apply: dimension mismatch");
  Vec out(dim);
  cplx lead = i_power(phase_exp);
  for (std::int64_t b = 0; b < dim; ++b) {
    // (X^x Z^z)|b> = (-1)^{z.b} |b ^ x>
    cplx coeff = parity64(z_bits & static_cast<std::uint64_t>(b)) ? -lead : lead;
    out(static_cast<Eigen::Index>(b ^ static_cast<std::int64_t>(x_bits))) =
        coeff * v(static_cast<Eigen::Index>(b));
  }
  return out;
}

Mat PauliOperator::to_matrix() const {
  std::int64_t dim = std::int64_t{1} << n_qubits;
  Mat m = Mat::Zero(dim, dim);
  cplx lead = i_power(phase_exp);
  for (std::int64_t b = 0; b < dim; ++b) {
    cplx coeff = parity64(z_bits & static_cast<std::uint64_t>(b)) ? -lead : lead;
    m(static_cast<Eigen::Index>(b ^ static_cast<std::int64_t>(x_bits)),
      static_cast<Eigen::Index>(b)) = coeff;
  }
  return m;
}

bool PauliOperator::equals(const PauliOperator& other) const {
  return n_qubits == other.n_qubits && x_bits == other.x_bits &&
         z_bits == other.z_bits && ((phase_exp ^ other.phase_exp) & 3) == 0;
}

CliffordElement::CliffordElement(int n_qubits,
                                 std::vector<PauliOperator> x_images,
                                 std::vector<PauliOperator> z_images)
    : n_(n_qubits),
      x_images_(std::move(x_images)),
      z_images_(std::move(z_images)) {
  if (n_ < 1 || n_ > kMaxStateQubits)
    throw std::invalid_argument("CliffordElement: qubit count out of range");
  if (x_images_.size() != static_cast<std::size_t>(n_) ||
      z_images_.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("CliffordElement: need n X images and n Z images");
  for (int j = 0; j < n_; ++j) {
    if (!x_images_[j].is_hermitian() || !z_images_[j].is_hermitian())
      throw std::invalid_argument("CliffordElement: images must be Hermitian");
    if (x_images_[j].commutes_with(z_images_[j]))
      throw std::invalid_argument(
          "CliffordElement: X/Z images of one qubit must anticommute");
    for (int k = 0; k < j; ++k) {
      if (!x_images_[j].commutes_with(x_images_[k]) ||
          !z_images_[j].commutes_with(z_images_[k]) ||
          !x_images_[j].commutes_with(z_images_[k]) ||
          !z_images_[j].commutes_with(x_images_[k]))
        throw std::invalid_argument(
            "CliffordElement: images of distinct qubits must commute");
    }
  }
}

PauliOperator CliffordElement::conjugate(const PauliOperator& p) const {
  if (p.n_qubits != n_)
    throw std::invalid_argument("CliffordElement::conjugate: qubit count mismatch");
  PauliOperator out = PauliOperator::identity(n_);
  out.phase_exp = p.phase_exp;
  for (int j = 0; j < n_; ++j)
    if ((p.x_bits >> j) & 1) out = out.multiply(x_images_[j]);
  for (int j = 0; j < n_; ++j)
    if ((p.z_bits >> j) & 1) out = out.multiply(z_images_[j]);
  return out;
}

Mat CliffordElement::to_matrix() const {
  std::int64_t dim = std::int64_t{1} << n_;

  // U|0^n> is the unique state stabilized by the Z images; project candidate
  // basis vectors until one has support. All intermediate amplitudes are
  // dyadic rationals, so the support threshold 1/(2 dim) is safe.
  Vec ground;
  bool found = false;
  for (std::int64_t k = 0; k < dim && !found; ++k) {
    Vec v = Vec::Zero(dim);
    v(static_cast<Eigen::Index>(k)) = 1.0;
    for (int j = 0; j < n_; ++j) v = 0.5 * (v + z_images_[j].apply(v));
    double nsq = v.squaredNorm();
    if (nsq > 0.5 / static_cast<double>(dim)) {
      ground = v / std::sqrt(nsq);
      found = true;
    }
  }
  if (!found)
    throw std::logic_error("CliffordElement::to_matrix: stabilizer projector annihilated every basis vector");
  for (Eigen::Index i = 0; i < ground.size(); ++i) {
    if (std::abs(ground(i)) > 1e-9) {
      ground *= std::conj(ground(i)) / std::abs(ground(i));
      break;
    }
  }

  // Column x is prod_j (U X_j U^dag)^{x_j} applied to U|0^n>; the factors
  // commute exactly, so the order is immaterial.
  Mat u(dim, dim);
  for (std::int64_t x = 0; x < dim; ++x) {
    Vec col = ground;
    for (int j = 0; j < n_; ++j)
      if ((x >> j) & 1) col = x_images_[j].apply(col);
    u.col(static_cast<Eigen::Index>(x)) = col;
  }
  return u;
}

}  // namespace qsynth
