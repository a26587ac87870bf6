#include "qsynth/phase_states.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsynth {

PhaseOracle::PhaseOracle(int n_bits, std::vector<std::uint8_t> table)
    : n_bits_(n_bits), table_(std::move(table)) {
  if (n_bits < 1 || n_bits > kMaxOracleBits) {
    std::ostringstream msg;
    msg << "PhaseOracle: " << n_bits << " input bits outside [1, "
        << kMaxOracleBits << "]";
    throw std::invalid_argument(msg.str());
  }
  if (table_.size() != (std::size_t{1} << n_bits))
    throw std::invalid_argument("PhaseOracle: truth table size must be 2^n_bits");
}

PhaseOracle PhaseOracle::zero(int n_bits) {
  if (n_bits < 1 || n_bits > kMaxOracleBits)
    throw std::invalid_argument("PhaseOracle::zero: bit count out of range");
  return PhaseOracle(n_bits, std::vector<std::uint8_t>(std::size_t{1} << n_bits, 0));
}

StateVector build_phase_state(const PhaseOracle& f) {
  if (f.n_bits() > kMaxStateQubits)
    throw std::invalid_argument(
        "build_phase_state: oracle width exceeds the statevector cap");
  std::int64_t dim = f.domain_size();
  double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  Vec v(dim);
  for (std::int64_t x = 0; x < dim; ++x)
    v(static_cast<Eigen::Index>(x)) =
        f.value(static_cast<std::uint64_t>(x)) ? -amp : amp;
  return StateVector(std::move(v));
}

BestPhaseOracle best_phase_oracle(const Eigen::VectorXd& a) {
  int n = log2_exact(a.size());
  if (n < 1 || n > kMaxOracleBits)
    throw std::invalid_argument(
        "best_phase_oracle: length must be a power of two within the oracle cap");
  std::vector<std::uint8_t> table(static_cast<std::size_t>(a.size()));
  for (Eigen::Index x = 0; x < a.size(); ++x)
    table[static_cast<std::size_t>(x)] = a(x) < 0.0 ? 1 : 0;
  double l1 = a.cwiseAbs().sum();
  double overlap = l1 / std::sqrt(static_cast<double>(a.size()));
  return BestPhaseOracle{PhaseOracle(n, std::move(table)), overlap};
}

double l4_lower_bound(const Eigen::VectorXd& a, const NumericPolicy& policy) {
  double norm = a.norm();
  if (std::abs(norm - 1.0) > policy.norm_tol) {
    std::ostringstream msg;
    msg << "l4_lower_bound: vector norm " << norm << " is not 1 within "
        << policy.norm_tol;
    throw std::invalid_argument(msg.str());
  }
  double fourth = a.array().square().square().sum();
  return 1.0 / std::sqrt(fourth);
}

}  // namespace qsynth
