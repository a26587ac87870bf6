#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qsynth/ensembles.hpp"
#include "qsynth/qcore.hpp"
#include "test_util.hpp"

using namespace qsynth;

namespace {

// Mean and the 3-sigma half-width of the sample mean.
struct MeanBand {
  double mean;
  double band;
};

MeanBand mean_band(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, 3.0 * std::sqrt(var / static_cast<double>(xs.size()))};
}

Mat canonical_phase(Mat m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > 0.3) {
        m *= std::conj(m(i, j)) / std::abs(m(i, j));
        return m;
      }
  return m;
}

// All 24 single-qubit Clifford classes (mod global phase) by closure of
// {H, S} under left multiplication.
std::vector<Mat> single_qubit_clifford_classes() {
  Mat h(2, 2), s(2, 2);
  h << 1, 1, 1, -1;
  h *= M_SQRT1_2;
  s << 1, 0, 0, cplx(0, 1);
  std::vector<Mat> classes{canonical_phase(Mat::Identity(2, 2))};
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Mat> found = classes;
    for (const Mat& m : classes)
      for (const Mat* g : {&h, &s}) {
        Mat cand = canonical_phase(*g * m);
        bool known = false;
        for (const Mat& k : found)
          if ((cand - k).cwiseAbs().maxCoeff() < 1e-6) {
            known = true;
            break;
          }
        if (!known) {
          found.push_back(cand);
          grew = true;
        }
      }
    classes = std::move(found);
  }
  return classes;
}

}  // namespace

TEST_CASE("haar state moments match the design facts") {
  RngStream rng(101, 0);
  const Eigen::Index d = 4;
  const int trials = 40000;
  std::vector<double> second, fourth, collision;
  second.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    StateVector psi = haar_state(2, rng);
    double a0 = std::norm(psi.amplitude(0));
    second.push_back(a0);
    fourth.push_back(a0 * a0);
    double c = 0.0;
    for (Eigen::Index x = 0; x < d; ++x)
      c += std::norm(psi.amplitude(static_cast<std::uint64_t>(x))) *
           std::norm(psi.amplitude(static_cast<std::uint64_t>(x)));
    collision.push_back(c);
  }
  MeanBand m2 = mean_band(second);
  CHECK(std::abs(m2.mean - 1.0 / d) < m2.band);
  MeanBand m4 = mean_band(fourth);
  CHECK(std::abs(m4.mean - 2.0 / (d * (d + 1.0))) < m4.band);
  MeanBand mc = mean_band(collision);
  CHECK(std::abs(mc.mean - 2.0 / (d + 1.0)) < mc.band);
}

TEST_CASE("haar unitaries are unitary and reproducible") {
  for (int n : {1, 2, 3}) {
    RngStream rng(202, static_cast<std::uint64_t>(n));
    UnitaryMatrix u = haar_unitary(n, rng);
    CHECK_NOTHROW(UnitaryMatrix{u.matrix()});
  }
  RngStream a(7, 5), b(7, 5), c(7, 6);
  Mat ua = haar_unitary_matrix(8, a);
  Mat ub = haar_unitary_matrix(8, b);
  Mat uc = haar_unitary_matrix(8, c);
  CHECK((ua - ub).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ua - uc).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("haar unitary first column is invariant under a fixed rotation") {
  RngStream rng(303, 0);
  RngStream vrng(303, 1);
  Mat v = haar_unitary_matrix(4, vrng);
  std::vector<double> plain, rotated;
  for (int t = 0; t < 20000; ++t) {
    Mat u = haar_unitary_matrix(4, rng);
    plain.push_back(std::norm(u(0, 0)));
    rotated.push_back(std::norm((v * u)(0, 0)));
  }
  MeanBand mp = mean_band(plain);
  MeanBand mr = mean_band(rotated);
  CHECK(std::abs(mp.mean - 0.25) < mp.band);
  CHECK(std::abs(mr.mean - 0.25) < mr.band);
}

TEST_CASE("pauli phase algebra is exact") {
  // XZ = -iY, so (i)(X Z) must equal Y.
  PauliOperator x = PauliOperator::hermitian_word(1, 1, 0, false);
  PauliOperator z = PauliOperator::hermitian_word(1, 0, 1, false);
  PauliOperator y = PauliOperator::hermitian_word(1, 1, 1, false);
  PauliOperator xz = x.multiply(z);
  Mat expect_y(2, 2);
  expect_y << 0, cplx(0, -1), cplx(0, 1), 0;
  CHECK((y.to_matrix() - expect_y).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((xz.to_matrix() - (x.to_matrix() * z.to_matrix())).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(y.is_hermitian());
  CHECK(!x.commutes_with(z));
  CHECK(x.multiply(x).equals(PauliOperator::identity(1)));

  RngStream rng(404, 0);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 1 + static_cast<int>(rng.uniform_below(3));
    std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    PauliOperator p = PauliOperator::hermitian_word(
        n, rng.next_u64() & mask, rng.next_u64() & mask, rng.next_u64() & 1);
    PauliOperator q = PauliOperator::hermitian_word(
        n, rng.next_u64() & mask, rng.next_u64() & mask, rng.next_u64() & 1);
    Mat lhs = p.multiply(q).to_matrix();
    Mat rhs = p.to_matrix() * q.to_matrix();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("random cliffords materialize to unitaries consistent with their tableau") {
  RngStream rng(505, 0);
  for (int rep = 0; rep < 40; ++rep) {
    int n = 1 + static_cast<int>(rng.uniform_below(3));
    CliffordElement c = random_clifford(n, rng);
    Mat u = c.to_matrix();
    CHECK_NOTHROW(UnitaryMatrix{u});
    std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    PauliOperator p = PauliOperator::hermitian_word(
        n, rng.next_u64() & mask, rng.next_u64() & mask, rng.next_u64() & 1);
    Mat via_tableau = c.conjugate(p).to_matrix();
    Mat via_dense = u * p.to_matrix() * u.adjoint();
    CHECK((via_tableau - via_dense).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("clifford sampling is reproducible per stream") {
  RngStream a(99, 1), b(99, 1);
  Mat ua = random_clifford(3, a).to_matrix();
  Mat ub = random_clifford(3, b).to_matrix();
  CHECK((ua - ub).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-qubit clifford classes are uniform") {
  std::vector<Mat> classes = single_qubit_clifford_classes();
  REQUIRE(classes.size() == 24);

  RngStream rng(606, 0);
  const int trials = 100000;
  std::vector<int> counts(24, 0);
  for (int t = 0; t < trials; ++t) {
    Mat u = canonical_phase(random_clifford(1, rng).to_matrix());
    int hit = -1;
    for (std::size_t k = 0; k < classes.size(); ++k)
      if ((u - classes[k]).cwiseAbs().maxCoeff() < 1e-6) {
        hit = static_cast<int>(k);
        break;
      }
    REQUIRE(hit >= 0);
    ++counts[hit];
  }
  double p = 1.0 / 24.0;
  double band = 3.0 * std::sqrt(p * (1.0 - p) / trials);
  for (int cnt : counts) {
    double freq = static_cast<double>(cnt) / trials;
    CHECK(std::abs(freq - p) < band);
  }
}

TEST_CASE("clifford twirl reproduces the 2-design moments") {
  RngStream rng(707, 0);
  RngStream taurng(707, 1);
  const int n = 2;
  const Eigen::Index d = 4;
  Vec tau = haar_vector(d, taurng);
  const int trials = 30000;
  std::vector<double> second, fourth, collision;
  for (int t = 0; t < trials; ++t) {
    Mat c = random_clifford(n, rng).to_matrix();
    Vec w = c * tau;
    double a0 = std::norm(w(0));
    second.push_back(a0);
    fourth.push_back(a0 * a0);
    double col = 0.0;
    for (Eigen::Index x = 0; x < d; ++x) col += std::norm(w(x)) * std::norm(w(x));
    collision.push_back(col);
  }
  MeanBand m2 = mean_band(second);
  CHECK(std::abs(m2.mean - 1.0 / d) < m2.band);
  MeanBand m4 = mean_band(fourth);
  CHECK(std::abs(m4.mean - 2.0 / (d * (d + 1.0))) < m4.band);
  MeanBand mc = mean_band(collision);
  CHECK(std::abs(mc.mean - 2.0 / (d + 1.0)) < mc.band);
}

TEST_CASE("anticoncentration holds for clifford twirls") {
  // Pr[|<x|C tau>|^2 >= theta/d] >= (1-theta)^2 / 2 at theta = 1/2.
  const double theta = 0.5;
  for (int n : {2, 3}) {
    RngStream rng(808, static_cast<std::uint64_t>(n));
    RngStream taurng(809, static_cast<std::uint64_t>(n));
    const Eigen::Index d = Eigen::Index{1} << n;
    Vec tau = haar_vector(d, taurng);
    const int trials = 20000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      Mat c = random_clifford(n, rng).to_matrix();
      Vec w = c * tau;
      if (std::norm(w(0)) >= theta / d) ++hits;
    }
    double rate = static_cast<double>(hits) / trials;
    double sigma = std::sqrt(rate * (1.0 - rate) / trials);
    CHECK(rate >= (1.0 - theta) * (1.0 - theta) / 2.0 - 3.0 * sigma);
  }
}
