#include "qsynth/distill.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qsynth {

int auto_rounds(int m, int n_qubits) {
  if (m < 1 || n_qubits < 1) {
    throw std::invalid_argument("auto_rounds: m and n_qubits must be positive");
  }
  int l = 0;
  long long cap = n_qubits;
  while (cap * 6 <= m) {
    cap *= 6;
    ++l;
  }
  return l;
}

namespace {

int resolve_rounds(const DistillationConfig& config, std::size_t n_inputs,
                   int n_qubits) {
  if (config.m != 0 && config.m != static_cast<int>(n_inputs)) {
    std::ostringstream msg;
    msg << "distill: config.m = " << config.m << " but " << n_inputs
        << " inputs were supplied";
    throw std::invalid_argument(msg.str());
  }
  if (n_inputs < 2) {
    throw std::invalid_argument("distill: at least 2 input registers required");
  }
  if (config.rounds == DistillationConfig::kAutoRounds) {
    if (n_qubits < 1) {
      throw std::invalid_argument(
          "distill: automatic round count needs a register qubit count; "
          "pass explicit rounds");
    }
    return auto_rounds(static_cast<int>(n_inputs), n_qubits);
  }
  if (config.rounds < 1) {
    throw std::invalid_argument("distill: explicit rounds must be >= 1");
  }
  return config.rounds;
}

// Shared round loop. All entry points route through here so they draw from
// rng in exactly the same order: one uniform per pair in sampled mode, plus
// one per successful pair when keep_random_survivor is set.
template <typename Reg, typename OverlapFn, typename MergeFn>
void run_rounds(std::vector<Reg>& regs, std::vector<int>& ids, int rounds,
                const DistillationConfig& config, RngStream& rng,
                OverlapFn&& reg_overlap, MergeFn&& merge,
                std::vector<int>& counts, std::vector<double>& min_overlaps,
                std::vector<std::vector<PairOutcome>>* pair_log, double& all_p,
                bool& aborted) {
  auto record = [&] {
    counts.push_back(static_cast<int>(regs.size()));
    if (!regs.empty()) {
      double mn = reg_overlap(regs[0]);
      for (std::size_t i = 1; i < regs.size(); ++i) {
        mn = std::min(mn, reg_overlap(regs[i]));
      }
      min_overlaps.push_back(mn);
    }
  };
  record();
  for (int k = 0; k < rounds && !regs.empty(); ++k) {
    std::vector<Reg> next;
    std::vector<int> next_ids;
    std::vector<PairOutcome> log;
    std::size_t pairs = regs.size() / 2;
    next.reserve(pairs + 1);
    next_ids.reserve(pairs + 1);
    for (std::size_t j = 0; j < pairs; ++j) {
      auto [p, child] = merge(regs[2 * j], regs[2 * j + 1]);
      bool success = config.mode == DistillMode::sampled ? rng.uniform() < p
                                                         : true;
      if (config.mode == DistillMode::exact_conditional) all_p *= p;
      int kept = ids[2 * j];
      if (success && config.keep_random_survivor && rng.uniform() < 0.5) {
        kept = ids[2 * j + 1];
      }
      log.push_back(PairOutcome{reg_overlap(regs[2 * j]),
                                reg_overlap(regs[2 * j + 1]),
                                reg_overlap(child), p, success});
      if (success) {
        next.push_back(std::move(child));
        next_ids.push_back(kept);
      }
    }
    if (regs.size() % 2 == 1) {
      // The unpaired trailing register is never tested this round.
      next.push_back(std::move(regs.back()));
      next_ids.push_back(ids.back());
    }
    regs = std::move(next);
    ids = std::move(next_ids);
    if (pair_log != nullptr) pair_log->push_back(std::move(log));
    record();
  }
  aborted = regs.empty();
}

std::vector<int> iota_ids(std::size_t m) {
  std::vector<int> ids(m);
  for (std::size_t i = 0; i < m; ++i) ids[i] = static_cast<int>(i);
  return ids;
}

// Low-rank register: state = v m v^dagger with v holding the lineage's pure
// input vectors as columns (unit but not orthonormal) and m Hermitian PSD.
struct LowRankState {
  Mat v;
  Mat m;
};

}  // namespace

DistillationReport distill(const std::vector<DensityMatrix>& inputs,
                           const StateVector& target,
                           const DistillationConfig& config, RngStream& rng) {
  for (const DensityMatrix& rho : inputs) {
    if (rho.dim() != target.dim()) {
      throw std::invalid_argument(
          "distill: input register dimension differs from the target");
    }
  }
  int rounds = resolve_rounds(config, inputs.size(), target.n_qubits());

  std::vector<DensityMatrix> regs = inputs;
  std::vector<int> ids = iota_ids(inputs.size());
  DistillationReport report;
  auto reg_ovl = [&](const DensityMatrix& r) { return dm_overlap(r, target); };
  auto merge = [](const DensityMatrix& a, const DensityMatrix& b) {
    SwapTestOutcome out = swap_test_exact(a, b);
    return std::pair<double, DensityMatrix>(out.p_success,
                                            std::move(out.survivor));
  };
  run_rounds(regs, ids, rounds, config, rng, reg_ovl, merge,
             report.survivor_counts, report.survivor_overlaps,
             &report.pair_log, report.all_success_probability, report.aborted);
  report.survivor_ids = std::move(ids);
  report.final_overlaps.reserve(regs.size());
  for (const DensityMatrix& r : regs) {
    report.final_overlaps.push_back(dm_overlap(r, target));
  }
  report.survivor_states = std::move(regs);
  return report;
}

DistillationReport distill_pure(const std::vector<StateVector>& inputs,
                                const StateVector& target,
                                const DistillationConfig& config,
                                RngStream& rng) {
  for (const StateVector& psi : inputs) {
    if (psi.dim() != target.dim()) {
      throw std::invalid_argument(
          "distill_pure: input register dimension differs from the target");
    }
  }
  int rounds = resolve_rounds(config, inputs.size(), target.n_qubits());

  std::vector<LowRankState> regs;
  regs.reserve(inputs.size());
  for (const StateVector& psi : inputs) {
    LowRankState lr;
    lr.v = psi.amplitudes();
    lr.m = Mat::Identity(1, 1);
    regs.push_back(std::move(lr));
  }
  std::vector<int> ids = iota_ids(inputs.size());
  const Vec& tau = target.amplitudes();

  auto reg_ovl = [&](const LowRankState& r) {
    Mat w = r.v.adjoint() * tau;
    return (w.adjoint() * r.m * w)(0, 0).real();
  };
  auto merge = [](const LowRankState& a, const LowRankState& b) {
    // With rho_i = v_i m_i v_i^dagger and g = v_a^dagger v_b:
    //   tr(rho_a rho_b) = tr(m_a g m_b g^dagger)
    //   rho_a rho_b     = v_a (m_a g m_b) v_b^dagger
    Mat g = a.v.adjoint() * b.v;
    Mat t = a.m * g * b.m;
    double cross = (t * g.adjoint()).trace().real();
    double p = 0.5 * (1.0 + cross);
    Eigen::Index ra = a.v.cols();
    Eigen::Index rb = b.v.cols();
    LowRankState child;
    child.v.resize(a.v.rows(), ra + rb);
    child.v << a.v, b.v;
    child.m.resize(ra + rb, ra + rb);
    child.m.topLeftCorner(ra, ra) = a.m;
    child.m.topRightCorner(ra, rb) = t;
    child.m.bottomLeftCorner(rb, ra) = t.adjoint();
    child.m.bottomRightCorner(rb, rb) = b.m;
    child.m /= 2.0 * (1.0 + cross);
    return std::pair<double, LowRankState>(p, std::move(child));
  };

  DistillationReport report;
  run_rounds(regs, ids, rounds, config, rng, reg_ovl, merge,
             report.survivor_counts, report.survivor_overlaps,
             &report.pair_log, report.all_success_probability, report.aborted);
  report.survivor_ids = std::move(ids);
  report.final_overlaps.reserve(regs.size());
  report.survivor_states.reserve(regs.size());
  for (const LowRankState& r : regs) {
    report.final_overlaps.push_back(reg_ovl(r));
    report.survivor_states.push_back(
        DensityMatrix::trusted(r.v * r.m * r.v.adjoint()));
  }
  return report;
}

ScalarDistillationReport distill_orthogonal(
    const std::vector<double>& overlaps, const DistillationConfig& config,
    RngStream& rng) {
  for (double g : overlaps) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw std::invalid_argument(
          "distill_orthogonal: overlaps must lie in [0, 1]");
    }
  }
  if (config.rounds == DistillationConfig::kAutoRounds) {
    throw std::invalid_argument(
        "distill_orthogonal: scalar registers carry no qubit count; pass "
        "explicit rounds");
  }
  int rounds = resolve_rounds(config, overlaps.size(), 0);

  std::vector<double> regs = overlaps;
  std::vector<int> ids = iota_ids(overlaps.size());
  auto reg_ovl = [](double g) { return g; };
  auto merge = [](double g1, double g2) {
    double c = g1 * g2;
    double child = (g1 + g2 + 2.0 * c) / (2.0 * (1.0 + c));
    return std::pair<double, double>(0.5 * (1.0 + c), child);
  };

  ScalarDistillationReport report;
  run_rounds(regs, ids, rounds, config, rng, reg_ovl, merge,
             report.survivor_counts, report.survivor_overlaps, nullptr,
             report.all_success_probability, report.aborted);
  report.survivor_ids = std::move(ids);
  report.final_overlaps = std::move(regs);
  return report;
}

ConditionDiagnostics check_conditions(const std::vector<StateVector>& inputs,
                                      const StateVector& target) {
  if (inputs.empty()) {
    throw std::invalid_argument("check_conditions: no inputs");
  }
  for (const StateVector& psi : inputs) {
    if (psi.dim() != target.dim()) {
      throw std::invalid_argument(
          "check_conditions: input dimension differs from the target");
    }
  }
  const Vec& tau = target.amplitudes();
  std::vector<cplx> u(inputs.size());
  double min_overlap = 1.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    u[i] = inputs[i].amplitudes().dot(tau);  // <psi_i|tau>
    min_overlap = std::min(min_overlap, std::norm(u[i]));
  }
  double max_cross = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = i + 1; j < inputs.size(); ++j) {
      cplx cross = inputs[i].amplitudes().dot(inputs[j].amplitudes()) -
                   u[i] * std::conj(u[j]);
      max_cross = std::max(max_cross, std::norm(cross));
    }
  }
  return ConditionDiagnostics{min_overlap, max_cross};
}

double overlap_bound(double a, int rounds) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw std::invalid_argument("overlap_bound: a must lie in (0, 1]");
  }
  if (rounds < 0) {
    throw std::invalid_argument("overlap_bound: rounds must be >= 0");
  }
  double value = 1.0 - 0.5 * std::pow(0.8, rounds - 2.0 / (a * a));
  return std::clamp(value, 0.0, 1.0);
}

std::optional<double> survival_bound(int m, int n) {
  if (n < 12 || m < n) return std::nullopt;
  return 2.0 * std::exp(-n / 12.0);
}

std::vector<double> gram_schmidt_diagnostic(
    const std::vector<StateVector>& inputs, const StateVector& target) {
  if (inputs.empty()) {
    throw std::invalid_argument("gram_schmidt_diagnostic: no inputs");
  }
  for (const StateVector& psi : inputs) {
    if (psi.dim() != target.dim()) {
      throw std::invalid_argument(
          "gram_schmidt_diagnostic: input dimension differs from the target");
    }
  }
  const Vec& tau = target.amplitudes();
  std::size_t m = inputs.size();
  std::vector<double> residual(m, 0.0);
  std::vector<int> noise_pos(m, 0);  // 1-based position among noisy inputs
  std::vector<Vec> noise;
  std::vector<Vec> basis;
  int pos = 0;
  for (std::size_t j = 0; j < m; ++j) {
    Vec v = inputs[j].amplitudes() -
            tau.dot(inputs[j].amplitudes()) * tau;
    double b2 = v.squaredNorm();
    if (b2 < 1e-24) continue;  // no noise component
    Vec phi = v / std::sqrt(b2);
    noise_pos[j] = ++pos;
    Vec w = phi;
    double r = 0.0;
    for (const Vec& e : basis) {
      cplx c = e.dot(phi);
      r += std::norm(c);
      w -= c * e;
    }
    residual[j] = r;
    double wn = w.norm();
    if (wn > 1e-12) basis.push_back(w / wn);
    noise.push_back(std::move(phi));
  }
  double delta = 0.0;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    for (std::size_t j = i + 1; j < noise.size(); ++j) {
      delta = std::max(delta, std::norm(noise[i].dot(noise[j])));
    }
  }
  if (std::sqrt(delta) <= 1.0 / (8.0 * static_cast<double>(m))) {
    for (std::size_t j = 0; j < m; ++j) {
      if (noise_pos[j] == 0) continue;
      double bound = (2.0 * noise_pos[j] - 1.0) * delta + 1e-15;
      if (residual[j] > bound) {
        std::ostringstream msg;
        msg << "gram_schmidt_diagnostic: residual " << residual[j]
            << " at noisy input " << noise_pos[j] << " exceeds bound "
            << bound;
        throw std::logic_error(msg.str());
      }
    }
  }
  return residual;
}

}  // namespace qsynth
