#include "qsynth/qcore.hpp"

#include <sstream>
#include <stdexcept>

namespace qsynth {

namespace {

void require_equal_dim(std::int64_t a, std::int64_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double overlap(const StateVector& a, const StateVector& b) {
  require_equal_dim(a.dim(), b.dim(), "overlap");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double dm_overlap(const DensityMatrix& rho, const StateVector& tau) {
  require_equal_dim(rho.dim(), tau.dim(), "dm_overlap");
  return (tau.amplitudes().adjoint() * rho.matrix() * tau.amplitudes())(0, 0)
      .real();
}

StateVector apply_unitary(const UnitaryMatrix& u, const StateVector& psi) {
  require_equal_dim(u.dim(), psi.dim(), "apply_unitary");
  return StateVector(u.matrix() * psi.amplitudes());
}

DensityMatrix apply_unitary(const UnitaryMatrix& u, const DensityMatrix& rho) {
  require_equal_dim(u.dim(), rho.dim(), "apply_unitary");
  return DensityMatrix::trusted(u.matrix() * rho.matrix() * u.matrix().adjoint(),
                                rho.unnormalized());
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Vec out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    out.segment(i * b.dim(), b.dim()) = a.amplitudes()(i) * b.amplitudes();
  return StateVector(std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::int64_t da = a.dim(), db = b.dim();
  Mat out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return DensityMatrix::trusted(std::move(out),
                                a.unnormalized() || b.unnormalized());
}

DensityMatrix partial_trace(const DensityMatrix& joint, std::int64_t dim_a,
                            std::int64_t dim_b, int keep) {
  if (dim_a <= 0 || dim_b <= 0 || dim_a * dim_b != joint.dim())
    throw std::invalid_argument("partial_trace: factor dimensions do not multiply to the joint dimension");
  if (keep != 0 && keep != 1)
    throw std::invalid_argument("partial_trace: keep must be 0 or 1");
  const Mat& m = joint.matrix();
  if (keep == 0) {
    Mat out = Mat::Zero(dim_a, dim_a);
    for (Eigen::Index i = 0; i < dim_a; ++i)
      for (Eigen::Index j = 0; j < dim_a; ++j)
        out(i, j) = m.block(i * dim_b, j * dim_b, dim_b, dim_b).trace();
    return DensityMatrix::trusted(std::move(out), joint.unnormalized());
  }
  Mat out = Mat::Zero(dim_b, dim_b);
  for (Eigen::Index i = 0; i < dim_a; ++i)
    out += m.block(i * dim_b, i * dim_b, dim_b, dim_b);
  return DensityMatrix::trusted(std::move(out), joint.unnormalized());
}

DensityMatrix partial_trace_pair(const DensityMatrix& joint, int keep) {
  std::int64_t dim = joint.dim();
  std::int64_t half = 1;
  while (half * half < dim) half <<= 1;
  if (half * half != dim)
    throw std::invalid_argument("partial_trace_pair: joint dimension is not a perfect square");
  return partial_trace(joint, half, half, keep);
}

SwapTestOutcome swap_test_exact(const DensityMatrix& rho1,
                                const DensityMatrix& rho2) {
  require_equal_dim(rho1.dim(), rho2.dim(), "swap_test_exact");
  const Mat& r1 = rho1.matrix();
  const Mat& r2 = rho2.matrix();
  Mat r12 = r1 * r2;
  double cross = r12.trace().real();
  double p_success = 0.5 * (1.0 + cross);
  Mat survivor = (r1 + r2 + r12 + r12.adjoint()) / (2.0 * (1.0 + cross));
  return SwapTestOutcome{p_success, DensityMatrix::trusted(std::move(survivor))};
}

}  // namespace qsynth
