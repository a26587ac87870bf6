#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qsynth/ensembles.hpp"
#include "qsynth/phase_states.hpp"
#include "qsynth/qcore.hpp"
#include "test_util.hpp"

using namespace qsynth;

TEST_CASE("constant-zero oracle gives the uniform superposition") {
  PhaseOracle f = PhaseOracle::zero(3);
  StateVector p = build_phase_state(f);
  Vec plus = Vec::Constant(8, 1.0 / std::sqrt(8.0));
  CHECK(overlap(p, StateVector(plus)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("oracle construction rejects bad shapes") {
  CHECK_THROWS_AS(PhaseOracle(25, {}), std::invalid_argument);
  CHECK_THROWS_AS(PhaseOracle(2, std::vector<std::uint8_t>(3, 0)),
                  std::invalid_argument);
  // Oracles wider than the statevector cap exist but do not materialize.
  PhaseOracle wide = PhaseOracle::zero(14);
  CHECK_THROWS_AS(build_phase_state(wide), std::invalid_argument);
}

TEST_CASE("best phase oracle on the worked example") {
  Eigen::VectorXd a(4);
  a << 0.6, 0.8, 0.0, 0.0;
  BestPhaseOracle best = best_phase_oracle(a);
  CHECK(best.overlap == doctest::Approx(0.7).epsilon(1e-15));
  // All entries nonnegative, so the sign oracle is identically zero.
  for (std::uint64_t x = 0; x < 4; ++x) CHECK(!best.f.value(x));

  Eigen::VectorXd b(4);
  b << 0.6, -0.8, 0.0, 0.0;
  BestPhaseOracle bestb = best_phase_oracle(b);
  CHECK(bestb.f.value(1));
  CHECK(!bestb.f.value(0));
  CHECK(!bestb.f.value(2));  // sgn(0) counts as +
  CHECK(bestb.overlap == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("l1 identity holds exactly for the sign oracle") {
  RngStream rng(11, 0);
  for (int rep = 0; rep < 300; ++rep) {
    int n = 2 + static_cast<int>(rng.uniform_below(4));
    Eigen::Index d = Eigen::Index{1} << n;
    Eigen::VectorXd a(d);
    for (Eigen::Index i = 0; i < d; ++i) a(i) = rng.gaussian();
    a.normalize();
    BestPhaseOracle best = best_phase_oracle(a);
    StateVector p = build_phase_state(best.f);
    Vec ac = a.cast<cplx>();
    double inner = std::abs(ac.dot(p.amplitudes()));
    CHECK(std::abs(inner - best.overlap) < 1e-12);
    CHECK(std::abs(best.overlap - a.cwiseAbs().sum() / std::sqrt(double(d))) <
          1e-14);
  }
}

TEST_CASE("sign oracle is optimal over every phase pattern") {
  RngStream rng(13, 0);
  for (Eigen::Index d : {8, 16}) {
    Eigen::VectorXd a(d);
    for (Eigen::Index i = 0; i < d; ++i) a(i) = rng.gaussian();
    a.normalize();
    BestPhaseOracle best = best_phase_oracle(a);
    double sqrt_d = std::sqrt(static_cast<double>(d));
    double max_seen = 0.0;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << d); ++pattern) {
      double inner = 0.0;
      for (Eigen::Index x = 0; x < d; ++x)
        inner += ((pattern >> x) & 1) ? -a(x) : a(x);
      max_seen = std::max(max_seen, std::abs(inner) / sqrt_d);
    }
    CHECK(max_seen == doctest::Approx(best.overlap).epsilon(1e-12));
  }
}

TEST_CASE("l4 bound lower-bounds the l1 norm on unit vectors") {
  RngStream rng(17, 0);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::Index d = Eigen::Index{1} << (2 + rng.uniform_below(4));
    Eigen::VectorXd a(d);
    for (Eigen::Index i = 0; i < d; ++i) a(i) = rng.gaussian();
    a.normalize();
    CHECK(l4_lower_bound(a) <= a.cwiseAbs().sum() + 1e-12);
  }
  Eigen::VectorXd bad(4);
  bad << 1.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(l4_lower_bound(bad), std::invalid_argument);
}

TEST_CASE("random twirls land on phase states with the guaranteed rate") {
  // Pr[ |<C tau | p_f>|^2 >= gamma ] >= 1/2 - 2 gamma for the sign oracle of
  // Re(C tau). Reduced-size version; the acceptance suite runs the full grid.
  const double gamma = 0.125;
  for (int n : {3, 4}) {
    RngStream rng(19, static_cast<std::uint64_t>(n));
    RngStream taurng(23, static_cast<std::uint64_t>(n));
    Eigen::Index d = Eigen::Index{1} << n;
    Vec tau = haar_vector(d, taurng);
    const int trials = 4000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      Mat c = random_clifford(n, rng).to_matrix();
      Vec w = c * tau;
      BestPhaseOracle best = best_phase_oracle(w.real());
      StateVector p = build_phase_state(best.f);
      if (std::norm(p.amplitudes().dot(w)) >= gamma) ++hits;
    }
    double rate = static_cast<double>(hits) / trials;
    double sigma = std::sqrt(rate * (1.0 - rate) / trials);
    CHECK(rate >= 0.5 - 2.0 * gamma - 3.0 * sigma);
  }
}
