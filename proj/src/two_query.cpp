#include "qsynth/two_query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qsynth/ensembles.hpp"
#include "qsynth/one_query.hpp"

namespace qsynth {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int bits_for_dim(Eigen::Index d) {
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  if ((Eigen::Index{1} << n) != d) {
    throw std::invalid_argument("vector length must be a power of two");
  }
  return n;
}

// Indices sorted by magnitude descending; equal magnitudes keep index order.
std::vector<int> rank_order(const Vec& w) {
  std::vector<int> idx(static_cast<std::size_t>(w.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(w(a)) > std::abs(w(b));
  });
  return idx;
}

}  // namespace

double PermPhaseOracle::phase_value(int x) const {
  double scale = static_cast<double>(std::uint64_t{1} << phase_bits);
  return kTwoPi * static_cast<double>(phases[static_cast<std::size_t>(x)]) /
         scale;
}

PermPhaseOracle build_perm_phase_oracle(const Vec& u, const Vec& v,
                                        int phase_bits) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("input vectors must have equal length");
  }
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("inputs must be unit vectors");
  }
  if (phase_bits < 1 || phase_bits > 62) {
    throw std::invalid_argument("phase_bits must lie in [1, 62]");
  }
  PermPhaseOracle oracle;
  oracle.n_bits = bits_for_dim(u.size());
  oracle.phase_bits = phase_bits;

  const auto d = static_cast<std::size_t>(u.size());
  std::vector<int> by_u = rank_order(u);
  std::vector<int> by_v = rank_order(v);
  oracle.sigma.assign(d, 0);
  oracle.sigma_inverse.assign(d, 0);
  for (std::size_t k = 0; k < d; ++k) {
    oracle.sigma[static_cast<std::size_t>(by_u[k])] = by_v[k];
    oracle.sigma_inverse[static_cast<std::size_t>(by_v[k])] = by_u[k];
  }

  const std::uint64_t ticks = std::uint64_t{1} << phase_bits;
  oracle.phases.assign(d, 0);
  for (std::size_t x = 0; x < d; ++x) {
    if (u(static_cast<Eigen::Index>(x)) == cplx(0.0, 0.0)) continue;
    const auto y = static_cast<Eigen::Index>(oracle.sigma[x]);
    double theta = std::arg(v(y)) - std::arg(u(static_cast<Eigen::Index>(x)));
    if (theta < 0.0) theta += kTwoPi;
    if (theta >= kTwoPi) theta -= kTwoPi;
    auto t = static_cast<std::uint64_t>(
        std::llround(theta / kTwoPi * static_cast<double>(ticks)));
    oracle.phases[x] = t & (ticks - 1);  // the top grid point wraps to 0
  }
  return oracle;
}

Vec apply_perm_phase(const Vec& u, const PermPhaseOracle& oracle) {
  const auto d = static_cast<std::size_t>(u.size());
  if (oracle.sigma.size() != d) {
    throw std::invalid_argument("oracle dimension does not match the input");
  }
  Vec r = Vec::Zero(u.size());
  for (std::size_t x = 0; x < d; ++x) {
    // First query: the oracle writes the phase ticks and the permuted index
    // into the two ancilla registers.
    std::uint64_t reg_b = oracle.phases[x];
    int reg_c = oracle.sigma[x];
    // Phase application is controlled on the ticks register.
    double scale = static_cast<double>(std::uint64_t{1} << oracle.phase_bits);
    cplx amp = u(static_cast<Eigen::Index>(x)) *
               std::polar(1.0, kTwoPi * static_cast<double>(reg_b) / scale);
    // Second query: uncompute both ancillas from the permuted index.  The
    // XORs must clear them exactly or the tables are inconsistent.
    auto back = static_cast<std::size_t>(
        oracle.sigma_inverse[static_cast<std::size_t>(reg_c)]);
    std::uint64_t reg_a = x ^ back;
    reg_b ^= oracle.phases[back];
    if (reg_a != 0 || reg_b != 0) {
      throw std::logic_error("oracle round trip left a dirty ancilla");
    }
    r(reg_c) += amp;
  }
  return r;
}

namespace {

TwoQueryResult finish_synthesis(const StateVector& target,
                                const StateVector& expanded, const Vec& u,
                                const Vec& v, const Mat& v_matrix,
                                int phase_bits) {
  PermPhaseOracle oracle = build_perm_phase_oracle(u, v, phase_bits);
  Vec out = v_matrix.adjoint() * apply_perm_phase(u, oracle);

  const double sorted_distance = sorted_abs_distance(u, v);
  const double expanded_fidelity = std::norm(expanded.amplitudes().dot(out));

  const auto dim_first = static_cast<Eigen::Index>(target.dim());
  const Eigen::Index dim_pad = out.size() / dim_first;
  if (dim_pad == 1) {
    return TwoQueryResult{StateVector(out), expanded_fidelity,
                          expanded_fidelity, sorted_distance};
  }
  Mat blocks(dim_first, dim_pad);
  for (Eigen::Index i = 0; i < dim_first; ++i) {
    for (Eigen::Index b = 0; b < dim_pad; ++b) {
      blocks(i, b) = out(i * dim_pad + b);
    }
  }
  double fidelity = (blocks.adjoint() * target.amplitudes()).squaredNorm();
  Vec leading = blocks.col(0);
  double weight = leading.norm();
  if (weight == 0.0) {
    throw std::runtime_error("output carries no weight on zero padding");
  }
  return TwoQueryResult{StateVector(Vec(leading / weight)), fidelity,
                        expanded_fidelity, sorted_distance};
}

}  // namespace

TwoQueryResult two_query_synthesize(const StateVector& target,
                                    const UnitaryMatrix& u_twirl,
                                    const UnitaryMatrix& v_twirl,
                                    int phase_bits) {
  if (u_twirl.dim() != v_twirl.dim()) {
    throw std::invalid_argument("twirl unitaries must share a dimension");
  }
  int n_expanded = bits_for_dim(u_twirl.dim());
  StateVector expanded = expand_target(target, n_expanded);
  Vec u = u_twirl.matrix().col(0);
  Vec v = v_twirl.matrix() * expanded.amplitudes();
  return finish_synthesis(target, expanded, u, v, v_twirl.matrix(),
                          phase_bits);
}

TwoQueryResult two_query_synthesize(const StateVector& target, int n_expanded,
                                    int phase_bits, RngStream& rng) {
  if (n_expanded < target.n_qubits()) {
    throw std::invalid_argument("expanded register smaller than the target");
  }
  if (n_expanded > kMaxStateQubits) {
    throw std::invalid_argument("expanded register exceeds the qubit cap");
  }
  UnitaryMatrix u_twirl = haar_unitary(n_expanded, rng);
  UnitaryMatrix v_twirl = haar_unitary(n_expanded, rng);
  return two_query_synthesize(target, u_twirl, v_twirl, phase_bits);
}

TwoQueryTrial two_query_sampled_trial(int n_bits, int phase_bits,
                                      RngStream& rng) {
  if (n_bits < 1 || n_bits > 20) {
    throw std::invalid_argument("trial register must hold 1 to 20 bits");
  }
  const Eigen::Index d = Eigen::Index{1} << n_bits;
  Vec u = haar_vector(d, rng);
  Vec v = haar_vector(d, rng);
  PermPhaseOracle oracle = build_perm_phase_oracle(u, v, phase_bits);
  Vec r = apply_perm_phase(u, oracle);
  TwoQueryTrial trial;
  trial.sorted_distance = sorted_abs_distance(u, v);
  trial.distance2 = (r - v).squaredNorm();
  trial.fidelity = std::norm(v.dot(r));
  return trial;
}

double sorted_abs_distance(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("input vectors must have equal length");
  }
  std::vector<double> mu(static_cast<std::size_t>(u.size()));
  std::vector<double> mv(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    mu[static_cast<std::size_t>(i)] = std::abs(u(i));
    mv[static_cast<std::size_t>(i)] = std::abs(v(i));
  }
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  std::sort(mv.begin(), mv.end(), std::greater<double>());
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double delta = mu[i] - mv[i];
    sum += delta * delta;
  }
  return std::sqrt(sum);
}

double rayleigh_quantile(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile argument must lie in [0, 1)");
  }
  return std::sqrt(-std::log1p(-p));
}

double empirical_wasserstein2(const std::vector<double>& samples,
                              ReferenceLaw reference) {
  if (samples.empty()) {
    throw std::invalid_argument("empirical measure needs at least one sample");
  }
  (void)reference;  // single reference law so far
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double q = rayleigh_quantile((static_cast<double>(i) + 0.5) / n);
    double delta = sorted[i] - q;
    sum += delta * delta;
  }
  return std::sqrt(sum / n);
}

}  // namespace qsynth
