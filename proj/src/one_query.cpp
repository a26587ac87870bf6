#include "qsynth/one_query.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qsynth/ensembles.hpp"
#include "qsynth/phase_states.hpp"
#include "qsynth/qcore.hpp"

namespace qsynth {

StateVector expand_target(const StateVector& target, int n_expanded) {
  if (n_expanded < target.n_qubits()) {
    throw std::invalid_argument(
        "expand_target: n_expanded must be at least the target size");
  }
  if (n_expanded > kMaxStateQubits) {
    std::ostringstream msg;
    msg << "expand_target: " << n_expanded << " qubits exceeds the cap of "
        << kMaxStateQubits;
    throw std::invalid_argument(msg.str());
  }
  int pad = n_expanded - target.n_qubits();
  if (pad == 0) return target;
  return tensor(target, StateVector::basis_state(pad, 0));
}

StateVector one_query_register(const StateVector& target_expanded,
                               const UnitaryMatrix& u) {
  if (u.dim() != target_expanded.dim()) {
    throw std::invalid_argument(
        "one_query_register: unitary and target dimensions differ");
  }
  Vec w = u.matrix() * target_expanded.amplitudes();
  BestPhaseOracle oracle = best_phase_oracle(w.real());
  StateVector pf = build_phase_state(oracle.f);
  return StateVector(u.matrix().adjoint() * pf.amplitudes());
}

StateVector one_query_register_sampled(const StateVector& target_expanded,
                                       RngStream& rng) {
  const Vec& tau = target_expanded.amplitudes();
  Vec w = haar_vector(tau.size(), rng);
  BestPhaseOracle oracle = best_phase_oracle(w.real());
  Vec pf = build_phase_state(oracle.f).amplitudes();
  cplx c = w.dot(pf);  // <w|p_f>
  double s = std::sqrt(std::max(0.0, 1.0 - std::norm(c)));
  Vec g = haar_vector(tau.size(), rng);
  g -= tau.dot(g) * tau;
  g.normalize();
  return StateVector(c * tau + s * g);
}

OneQueryResult one_query_synthesize(const StateVector& target,
                                    const OneQueryConfig& config) {
  if (config.n_target != target.n_qubits()) {
    std::ostringstream msg;
    msg << "one_query_synthesize: config.n_target = " << config.n_target
        << " but the target has " << target.n_qubits() << " qubits";
    throw std::invalid_argument(msg.str());
  }
  int n_expanded =
      config.n_expanded == 0 ? config.n_target + 4 : config.n_expanded;
  if (n_expanded < config.n_target) {
    throw std::invalid_argument(
        "one_query_synthesize: n_expanded must be at least n_target");
  }
  if (config.m < 2) {
    throw std::invalid_argument("one_query_synthesize: m must be at least 2");
  }

  StateVector expanded = expand_target(target, n_expanded);
  std::vector<StateVector> registers;
  registers.reserve(config.m);
  for (int j = 0; j < config.m; ++j) {
    RngStream reg_rng(config.seed, static_cast<std::uint64_t>(j));
    if (config.identity_hook) {
      registers.push_back(
          one_query_register(expanded, UnitaryMatrix::identity(n_expanded)));
    } else if (config.explicit_unitaries) {
      registers.push_back(
          one_query_register(expanded, haar_unitary(n_expanded, reg_rng)));
    } else {
      registers.push_back(one_query_register_sampled(expanded, reg_rng));
    }
  }

  OneQueryResult result;
  result.conditions = check_conditions(registers, expanded);
  double sum = 0.0;
  for (const StateVector& psi : registers) sum += overlap(psi, expanded);
  result.mean_register_overlap = sum / config.m;

  DistillationConfig dc = config.distill;
  dc.m = 0;  // inferred from the register list
  RngStream distill_rng(config.seed, static_cast<std::uint64_t>(config.m));
  result.distillation = distill_pure(registers, expanded, dc, distill_rng);
  result.aborted = result.distillation.aborted;
  if (result.aborted) return result;

  const DensityMatrix& survivor = result.distillation.survivor_states.front();
  result.expanded_overlap = result.distillation.final_overlaps.front();
  int pad = n_expanded - config.n_target;
  DensityMatrix reduced =
      pad == 0 ? survivor
               : partial_trace(survivor, std::int64_t{1} << config.n_target,
                               std::int64_t{1} << pad, 0);
  result.output_overlap = dm_overlap(reduced, target);
  result.output = std::move(reduced);
  return result;
}

}  // namespace qsynth
