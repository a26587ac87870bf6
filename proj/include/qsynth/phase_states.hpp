#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qsynth/types.hpp"

namespace qsynth {

// Phase oracles stay tabulated up to 24 input bits; phase states materialize
// only up to the statevector cap.
inline constexpr int kMaxOracleBits = 24;

// Boolean function f : {0,1}^n_bits -> {0,1} as an explicit truth table.
class PhaseOracle {
 public:
  PhaseOracle(int n_bits, std::vector<std::uint8_t> table);

  static PhaseOracle zero(int n_bits);

  int n_bits() const { return n_bits_; }
  bool value(std::uint64_t x) const { return table_[x] != 0; }
  std::int64_t domain_size() const { return static_cast<std::int64_t>(table_.size()); }

 private:
  int n_bits_;
  std::vector<std::uint8_t> table_;
};

// |p_f> = 2^{-n/2} sum_x (-1)^{f(x)} |x>.
StateVector build_phase_state(const PhaseOracle& f);

struct BestPhaseOracle {
  PhaseOracle f;
  double overlap;  // |<a|p_f>| = ||a||_1 / sqrt(d), maximal over all oracles
};

// Sign-pattern oracle f(x) = [a_x < 0] (zeros count as +). For a real vector
// a this choice maximizes |<a|p_f>| over every phase oracle, achieving
// ||a||_1 / sqrt(d).
BestPhaseOracle best_phase_oracle(const Eigen::VectorXd& a);

// 1 / ||a||_4^2, a lower bound on ||a||_1 for unit vectors. Errors if a is
// not unit norm.
double l4_lower_bound(const Eigen::VectorXd& a,
                      const NumericPolicy& policy = default_policy());

}  // namespace qsynth
