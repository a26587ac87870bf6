#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qsynth/qcore.hpp"
#include "qsynth/rng.hpp"
#include "qsynth/types.hpp"
#include "test_util.hpp"

using namespace qsynth;
using testutil::brute_force_swap;
using testutil::random_density;
using testutil::random_state;

TEST_CASE("state vector validation") {
  Vec good(2);
  good << 1.0, 0.0;
  CHECK_NOTHROW(StateVector{good});

  Vec bad_norm(2);
  bad_norm << 1.0, 0.5;
  CHECK_THROWS_AS(StateVector{bad_norm}, std::invalid_argument);

  Vec bad_dim(3);
  bad_dim << 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(StateVector{bad_dim}, std::invalid_argument);

  Vec too_big = Vec::Zero(std::int64_t{1} << (kMaxStateQubits + 1));
  too_big(0) = 1.0;
  CHECK_THROWS_AS(StateVector{too_big}, std::invalid_argument);

  StateVector basis = StateVector::basis_state(3, 5);
  CHECK(basis.n_qubits() == 3);
  CHECK(basis.amplitude(5) == cplx(1.0, 0.0));
}

TEST_CASE("density matrix validation") {
  Mat rho = Mat::Zero(2, 2);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  CHECK_NOTHROW(DensityMatrix{rho});

  Mat non_herm = rho;
  non_herm(0, 1) = cplx(0.3, 0.0);
  CHECK_THROWS_AS(DensityMatrix{non_herm}, std::invalid_argument);

  Mat bad_trace = 2.0 * rho;
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, std::invalid_argument);
  CHECK_NOTHROW(DensityMatrix(bad_trace, /*unnormalized=*/true));

  Mat not_psd = Mat::Zero(2, 2);
  not_psd(0, 0) = 1.5;
  not_psd(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{not_psd}, std::invalid_argument);

  std::int64_t over_cap = std::int64_t{1} << (kMaxDensityQubits + 1);
  Mat big = Mat::Identity(over_cap, over_cap) / static_cast<double>(over_cap);
  CHECK_THROWS_AS(DensityMatrix{big}, std::invalid_argument);
}

TEST_CASE("unitary validation") {
  Mat h(2, 2);
  h << 1, 1, 1, -1;
  CHECK_THROWS_AS(UnitaryMatrix{h}, std::invalid_argument);
  h *= M_SQRT1_2;
  CHECK_NOTHROW(UnitaryMatrix{h});

  UnitaryMatrix u = UnitaryMatrix::identity(2);
  StateVector psi = StateVector::basis_state(2, 1);
  CHECK(overlap(apply_unitary(u, psi), psi) == doctest::Approx(1.0));
}

TEST_CASE("overlap agrees between pure and density forms") {
  RngStream rng(7, 0);
  for (int rep = 0; rep < 25; ++rep) {
    StateVector a = random_state(8, rng);
    StateVector b = random_state(8, rng);
    double pure = overlap(a, b);
    double mixed = dm_overlap(DensityMatrix::from_pure(a), b);
    CHECK(pure == doctest::Approx(mixed).epsilon(1e-12));
    CHECK(pure >= 0.0);
    CHECK(pure <= 1.0 + 1e-12);
  }
  StateVector a = random_state(4, rng);
  StateVector b = random_state(8, rng);
  CHECK_THROWS_AS(overlap(a, b), std::invalid_argument);
}

TEST_CASE("tensor and partial trace round-trip") {
  RngStream rng(11, 0);
  DensityMatrix a = random_density(4, rng);
  DensityMatrix b = random_density(8, rng);
  DensityMatrix joint = tensor(a, b);
  CHECK(joint.dim() == 32);
  DensityMatrix back_a = partial_trace(joint, 4, 8, 0);
  DensityMatrix back_b = partial_trace(joint, 4, 8, 1);
  CHECK((back_a.matrix() - a.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back_b.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  DensityMatrix sq = tensor(a, random_density(4, rng));
  DensityMatrix keep0 = partial_trace_pair(sq, 0);
  CHECK((keep0.matrix() - a.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(partial_trace_pair(joint, 0), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(joint, 4, 4, 0), std::invalid_argument);
}

TEST_CASE("swap test on identical pure inputs passes with certainty") {
  RngStream rng(13, 0);
  StateVector psi = random_state(8, rng);
  DensityMatrix rho = DensityMatrix::from_pure(psi);
  SwapTestOutcome out = swap_test_exact(rho, rho);
  CHECK(out.p_success == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((out.survivor.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("swap test on orthogonal pure inputs") {
  DensityMatrix r0 = DensityMatrix::from_pure(StateVector::basis_state(2, 0));
  DensityMatrix r1 = DensityMatrix::from_pure(StateVector::basis_state(2, 1));
  SwapTestOutcome out = swap_test_exact(r0, r1);
  CHECK(out.p_success == doctest::Approx(0.5).epsilon(1e-12));
  Mat expected = 0.5 * (r0.matrix() + r1.matrix());
  CHECK((out.survivor.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("swap test survivor overlap for half-overlap orthogonal-noise pair") {
  // Inputs sqrt(a) tau + sqrt(1-a) e_i with a = 1/2 and orthonormal
  // tau, e_1, e_2. The survivor overlap must be exactly 3/5.
  Vec tau = Vec::Zero(4), e1 = Vec::Zero(4), e2 = Vec::Zero(4);
  tau(0) = 1.0;
  e1(1) = 1.0;
  e2(2) = 1.0;
  double a = 0.5;
  StateVector psi1(std::sqrt(a) * tau + std::sqrt(1 - a) * e1);
  StateVector psi2(std::sqrt(a) * tau + std::sqrt(1 - a) * e2);
  SwapTestOutcome out = swap_test_exact(DensityMatrix::from_pure(psi1),
                                        DensityMatrix::from_pure(psi2));
  CHECK(out.p_success == doctest::Approx((1.0 + 0.25) / 2.0).epsilon(1e-12));
  double got = dm_overlap(out.survivor, StateVector(tau));
  CHECK(got == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("swap test matches the brute-force three-register circuit") {
  RngStream rng(17, 0);
  for (Eigen::Index d : {2, 4, 8}) {
    for (int rep = 0; rep < 20; ++rep) {
      DensityMatrix r1 = random_density(d, rng);
      DensityMatrix r2 = random_density(d, rng);
      SwapTestOutcome fast = swap_test_exact(r1, r2);
      testutil::BruteForceSwapResult slow =
          brute_force_swap(r1.matrix(), r2.matrix());
      CHECK(std::abs(fast.p_success - slow.p_success) < 1e-10);
      CHECK((fast.survivor.matrix() - slow.survivor1).cwiseAbs().maxCoeff() <
            1e-10);
      // Both post-success registers carry the same reduced state.
      CHECK((slow.survivor1 - slow.survivor2).cwiseAbs().maxCoeff() < 1e-10);
      // Survivor must satisfy the full density-matrix contract.
      CHECK_NOTHROW(DensityMatrix{fast.survivor.matrix()});
      CHECK(fast.p_success >= 0.5 - 1e-12);
      CHECK(fast.p_success <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("survivor overlap lower bounds for orthogonal-noise mixtures") {
  RngStream rng(19, 0);
  Vec tau = Vec::Zero(8);
  tau(0) = 1.0;
  StateVector tau_state(tau);

  auto noisy_mixture = [&](double a, int offset) {
    // Mixture of pure states sqrt(a) tau + sqrt(1-a) e_k over three noise
    // directions private to this register.
    Mat rho = Mat::Zero(8, 8);
    double wsum = 0.0;
    double w[3];
    for (int k = 0; k < 3; ++k) {
      w[k] = 0.2 + rng.uniform();
      wsum += w[k];
    }
    for (int k = 0; k < 3; ++k) {
      Vec e = Vec::Zero(8);
      e(1 + offset + k) = 1.0;
      Vec psi = std::sqrt(a) * tau + std::sqrt(1 - a) * e;
      rho += (w[k] / wsum) * (psi * psi.adjoint());
    }
    return DensityMatrix(rho);
  };

  for (double a1 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double a2 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      DensityMatrix r1 = noisy_mixture(a1, 0);
      DensityMatrix r2 = noisy_mixture(a2, 3);
      SwapTestOutcome out = swap_test_exact(r1, r2);
      double got = dm_overlap(out.survivor, tau_state);
      CHECK(got >= (a1 + a2) / 2.0 - 1e-12);
      double a = std::min(a1, a2);
      CHECK(got >= a * (1.0 + a) / (1.0 + a * a) - 1e-12);
      double expected = (a1 + a2 + 2 * a1 * a2) / (2.0 * (1.0 + a1 * a2));
      CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("rng streams reproduce and decorrelate") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 64; ++i) {
    std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);

  RngStream g(1, 0);
  double mean = 0.0, m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = g.gaussian();
    mean += x;
    m2 += x * x;
  }
  mean /= n;
  m2 /= n;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(m2 - 1.0) < 0.05);

  RngStream u(2, 0);
  std::uint64_t counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < 50000; ++i) ++counts[u.uniform_below(5)];
  for (std::uint64_t cnt : counts) {
    CHECK(cnt > 9500);
    CHECK(cnt < 10500);
  }
}
