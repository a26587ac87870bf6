#include "qsynth/qma_search.hpp"

#include "qsynth/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qsynth {

namespace {

std::int64_t dim_of(int n_qubits) { return std::int64_t{1} << n_qubits; }

// Bit position of qubit q inside a basis index (qubit 0 most significant).
int index_bit(int n_qubits, int q) { return n_qubits - 1 - q; }

Mat dense_power(const Mat& m, std::int64_t p) {
  Mat result = Mat::Identity(m.rows(), m.cols());
  Mat base = m;
  std::int64_t e = p;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

PhaseOracle sign_oracle(const Vec& v) {
  Eigen::VectorXd re = v.real();
  return best_phase_oracle(re).f;
}

void require_normalized(const LocalHamiltonian& h, const char* op) {
  if (!h.normalized) {
    throw std::invalid_argument(std::string(op) +
                                " requires a normalized Hamiltonian; call "
                                "normalize_hamiltonian first");
  }
}

}  // namespace

void validate_hamiltonian(const LocalHamiltonian& h,
                          const NumericPolicy& policy) {
  if (h.n_qubits < 1 || h.n_qubits > kMaxDensityQubits) {
    throw std::invalid_argument(
        "hamiltonian qubit count must be in [1, " +
        std::to_string(kMaxDensityQubits) + "] for dense spectral analysis");
  }
  if (h.locality < 1 || h.locality > h.n_qubits) {
    throw std::invalid_argument("hamiltonian locality must be in [1, n]");
  }
  if (!std::isfinite(h.a) || !std::isfinite(h.b) || !(h.b > h.a)) {
    throw std::invalid_argument("hamiltonian thresholds must satisfy b > a");
  }
  for (std::size_t t = 0; t < h.terms.size(); ++t) {
    const HamiltonianTerm& term = h.terms[t];
    const std::string where = "hamiltonian term " + std::to_string(t);
    const int j = static_cast<int>(term.qubits.size());
    if (j < 1 || j > h.locality) {
      throw std::invalid_argument(where + ": acts on " + std::to_string(j) +
                                  " qubits, locality is " +
                                  std::to_string(h.locality));
    }
    for (int i = 0; i < j; ++i) {
      const int q = term.qubits[i];
      if (q < 0 || q >= h.n_qubits) {
        throw std::invalid_argument(where + ": qubit index " +
                                    std::to_string(q) + " out of range");
      }
      if (i > 0 && term.qubits[i - 1] >= q) {
        throw std::invalid_argument(where +
                                    ": qubit list must be strictly ascending");
      }
    }
    const Eigen::Index bd = Eigen::Index{1} << j;
    if (term.block.rows() != bd || term.block.cols() != bd) {
      throw std::invalid_argument(where + ": block must be " +
                                  std::to_string(bd) + "x" +
                                  std::to_string(bd));
    }
    const double herm = (term.block - term.block.adjoint()).cwiseAbs().maxCoeff();
    if (herm > policy.norm_tol) {
      throw std::invalid_argument(where + ": block is not Hermitian");
    }
  }
}

Mat hamiltonian_matrix(const LocalHamiltonian& h) {
  validate_hamiltonian(h);
  const std::int64_t dim = dim_of(h.n_qubits);
  Mat m = Mat::Zero(dim, dim);
  for (const HamiltonianTerm& term : h.terms) {
    const int j = static_cast<int>(term.qubits.size());
    const std::int64_t bd = std::int64_t{1} << j;
    for (std::int64_t z = 0; z < dim; ++z) {
      std::int64_t row_sub = 0;
      std::int64_t cleared = z;
      for (int i = 0; i < j; ++i) {
        const int bit = index_bit(h.n_qubits, term.qubits[i]);
        row_sub |= ((z >> bit) & 1) << (j - 1 - i);
        cleared &= ~(std::int64_t{1} << bit);
      }
      for (std::int64_t col_sub = 0; col_sub < bd; ++col_sub) {
        std::int64_t z2 = cleared;
        for (int i = 0; i < j; ++i) {
          const int bit = index_bit(h.n_qubits, term.qubits[i]);
          z2 |= ((col_sub >> (j - 1 - i)) & 1) << bit;
        }
        m(z, z2) += term.block(row_sub, col_sub);
      }
    }
  }
  return m;
}

double hamiltonian_energy(const LocalHamiltonian& h, const StateVector& state) {
  if (state.n_qubits() != h.n_qubits) {
    throw std::invalid_argument("state and hamiltonian qubit counts differ");
  }
  const Vec hpsi = hamiltonian_matrix(h) * state.amplitudes();
  return state.amplitudes().dot(hpsi).real();
}

LocalHamiltonian normalize_hamiltonian(const LocalHamiltonian& h) {
  validate_hamiltonian(h);
  const Mat dense = hamiltonian_matrix(h);
  Eigen::SelfAdjointEigenSolver<Mat> solver(dense, Eigen::EigenvaluesOnly);
  const double lmin = solver.eigenvalues().minCoeff();
  const double lmax = solver.eigenvalues().maxCoeff();

  LocalHamiltonian out = h;
  if (std::max(std::abs(lmin), std::abs(lmax)) < 1e-12) {
    out.normalized = true;
    out.degenerate = true;
    return out;
  }
  if (lmin >= -1e-12 && lmax <= 1.0 + 1e-12) {
    out.normalized = true;
    return out;
  }

  const double shift = lmin < 0.0 ? -lmin : 0.0;
  const double top = lmax + shift;
  const double scale = top > 1.0 ? 1.0 / top : 1.0;
  for (HamiltonianTerm& term : out.terms) term.block *= scale;
  // The identity shift lives on any one subset; fold it into the first term.
  out.terms.front().block +=
      (shift * scale) * Mat::Identity(out.terms.front().block.rows(),
                                      out.terms.front().block.cols());
  out.a = (h.a + shift) * scale;
  out.b = (h.b + shift) * scale;
  out.normalized = true;
  return out;
}

std::int64_t filter_exponent(int n_qubits, double delta) {
  if (n_qubits < 1) {
    throw std::invalid_argument("filter_exponent needs at least one qubit");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("filter_exponent needs delta in (0, 1)");
  }
  const double rhs = delta * std::ldexp(1.0, -(n_qubits + 1));
  const double base = 1.0 - delta / 4.0;
  const auto holds = [&](std::int64_t p) {
    return std::pow(base, 2.0 * static_cast<double>(p)) <= rhs;
  };
  const double guess = std::log(rhs) / (2.0 * std::log(base));
  std::int64_t p = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(guess)));
  while (p > 1 && holds(p - 1)) --p;
  while (!holds(p)) ++p;
  return p;
}

Vec filtered_seed_state(const LocalHamiltonian& h, const Mat& d_matrix,
                        std::int64_t p) {
  require_normalized(h, "filtered_seed_state");
  const std::int64_t dim = dim_of(h.n_qubits);
  if (d_matrix.rows() != dim || d_matrix.cols() != dim) {
    throw std::invalid_argument("twirl matrix dimension mismatch");
  }
  if (p < 1) throw std::invalid_argument("filter exponent must be positive");

  const Mat dense = hamiltonian_matrix(h);
  const Vec seed0 = d_matrix.col(0);
  Vec w;
  if (p <= kFilterPowerCap) {
    const Mat m = Mat::Identity(dim, dim) - dense;
    w = dense_power(m, p) * seed0;
  } else {
    // (1-H)^p in the eigenbasis, powered in log space relative to the
    // dominant surviving branch, so the direction stays correct even when
    // the absolute norm underflows double precision.
    Eigen::SelfAdjointEigenSolver<Mat> solver(dense);
    const Vec coeffs = solver.eigenvectors().adjoint() * seed0;
    const double pd = static_cast<double>(p);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    // Log magnitude of each branch after filtering; the dominant one is
    // rescaled to 1 so the direction survives arbitrary underflow.
    Eigen::VectorXd scores(coeffs.size());
    double max_score = neg_inf;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      const double mag = std::abs(coeffs(i));
      const double lam = std::clamp(solver.eigenvalues()(i), 0.0, 1.0);
      scores(i) = (mag == 0.0 || lam >= 1.0)
                      ? neg_inf
                      : std::log(mag) + pd * std::log1p(-lam);
      max_score = std::max(max_score, scores(i));
    }
    if (!std::isfinite(max_score)) {
      throw std::runtime_error(
          "energy filter annihilated the seed state; no surviving branch");
    }
    Vec filtered(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      const double mag = std::exp(scores(i) - max_score);
      filtered(i) = mag == 0.0 || std::abs(coeffs(i)) == 0.0
                        ? cplx(0.0, 0.0)
                        : mag * (coeffs(i) / std::abs(coeffs(i)));
    }
    w = solver.eigenvectors() * filtered;
  }
  const double norm = w.norm();
  if (norm < 1e-150) {
    throw std::runtime_error(
        "energy filter annihilated the seed state; no surviving branch");
  }
  return w / norm;
}

PhaseOracle qma_oracle_fn(const LocalHamiltonian& h, const Mat& c_matrix,
                          const Mat& d_matrix, std::int64_t p) {
  require_normalized(h, "qma_oracle_fn");
  const std::int64_t dim = dim_of(h.n_qubits);
  if (c_matrix.rows() != dim || c_matrix.cols() != dim ||
      d_matrix.rows() != dim || d_matrix.cols() != dim) {
    throw std::invalid_argument("twirl matrix dimension mismatch");
  }
  if (p < 1) throw std::invalid_argument("filter exponent must be positive");
  if (p > kFilterPowerCap) {
    throw std::invalid_argument(
        "filter exponent exceeds the dense powering cap; use qma_exp_search's "
        "spectral route");
  }
  const Mat m = Mat::Identity(dim, dim) - hamiltonian_matrix(h);
  const Vec v = c_matrix * (dense_power(m, p) * d_matrix.col(0));
  return sign_oracle(v);
}

PhaseOracle qma_oracle_fn(const LocalHamiltonian& h, const CliffordElement& c,
                          const CliffordElement& d, std::int64_t p) {
  if (c.n_qubits() != h.n_qubits || d.n_qubits() != h.n_qubits) {
    throw std::invalid_argument("twirl qubit counts differ from hamiltonian");
  }
  return qma_oracle_fn(h, c.to_matrix(), d.to_matrix(), p);
}

int energy_estimate_bits(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("energy_estimate_bits needs delta in (0, 1)");
  }
  const int m = 5 + static_cast<int>(std::ceil(std::log2(1.0 / delta)));
  if (m > 40) {
    throw std::invalid_argument(
        "gap too small for the readout register; 40 bits is the cap");
  }
  return m;
}

double acceptance_threshold(const LocalHamiltonian& h, int m_bits) {
  if (m_bits < 1 || m_bits > 40) {
    throw std::invalid_argument("m_bits must be in [1, 40]");
  }
  return h.a + 0.25 * (h.b - h.a) + std::ldexp(1.0, 1 - m_bits);
}

EnergyEstimateResult energy_estimate(const StateVector& state,
                                     const LocalHamiltonian& h, int m_bits,
                                     RngStream& rng) {
  require_normalized(h, "energy_estimate");
  if (state.n_qubits() != h.n_qubits) {
    throw std::invalid_argument("state and hamiltonian qubit counts differ");
  }
  if (m_bits < 1 || m_bits > 40) {
    throw std::invalid_argument("m_bits must be in [1, 40]");
  }

  Eigen::SelfAdjointEigenSolver<Mat> solver(hamiltonian_matrix(h));
  const Vec coeffs = solver.eigenvectors().adjoint() * state.amplitudes();
  const Eigen::VectorXd weights = coeffs.cwiseAbs2();

  // Born-rule branch choice.
  const double r = rng.uniform() * weights.sum();
  Eigen::Index branch = weights.size() - 1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights(i);
    if (r < acc) {
      branch = i;
      break;
    }
  }

  // Reading: floor(2^m E) with probability frac(2^m E), one tick lower
  // otherwise; an energy exactly on the grid reads exactly.
  const double t = std::ldexp(solver.eigenvalues()(branch), m_bits);
  const double f0 = std::floor(t);
  const double frac = t - f0;
  const double ticks = frac == 0.0 ? f0 : (rng.bernoulli(frac) ? f0 : f0 - 1.0);
  const double theta = std::ldexp(ticks, -m_bits);

  // Collapse onto every eigenvector that could have produced this reading.
  Vec post = Vec::Zero(state.dim());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double ti = std::ldexp(solver.eigenvalues()(i), m_bits);
    const double fi = std::floor(ti);
    const double fri = ti - fi;
    const bool consistent = (ticks == fi) || (fri > 0.0 && ticks == fi - 1.0);
    if (consistent) post += solver.eigenvectors().col(i) * coeffs(i);
  }
  const double norm = post.norm();
  if (norm < 1e-12) {
    throw std::runtime_error("energy readout produced an empty post-state");
  }

  return EnergyEstimateResult{theta, StateVector(post / norm),
                              theta <= acceptance_threshold(h, m_bits)};
}

double low_energy_mass(const StateVector& state, const LocalHamiltonian& h,
                       double cutoff) {
  if (state.n_qubits() != h.n_qubits) {
    throw std::invalid_argument("state and hamiltonian qubit counts differ");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(hamiltonian_matrix(h));
  double mass = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if (solver.eigenvalues()(i) <= cutoff) {
      mass += std::norm(solver.eigenvectors().col(i).dot(state.amplitudes()));
    }
  }
  return mass;
}

QmaSearchResult qma_search_one_query(const LocalHamiltonian& h,
                                     RngStream& rng) {
  const LocalHamiltonian hn = h.normalized ? h : normalize_hamiltonian(h);
  const std::int64_t p = filter_exponent(hn.n_qubits, hn.b - hn.a);

  const CliffordElement c = random_clifford(hn.n_qubits, rng);
  const CliffordElement d = random_clifford(hn.n_qubits, rng);
  const Mat cm = c.to_matrix();
  const PhaseOracle f = qma_oracle_fn(hn, cm, d.to_matrix(), p);
  const StateVector candidate(cm.adjoint() *
                              build_phase_state(f).amplitudes());

  const int m_bits = energy_estimate_bits(hn.b - hn.a);
  EnergyEstimateResult est = energy_estimate(candidate, hn, m_bits, rng);
  if (!est.accepted) {
    return QmaSearchResult{true, candidate, est.theta, std::nullopt, 0.0};
  }
  const double energy = hamiltonian_energy(hn, est.post_state);
  return QmaSearchResult{false, candidate, est.theta,
                         std::move(est.post_state), energy};
}

QmaExpResult qma_exp_search(const LocalHamiltonian& h, RngStream& rng) {
  const LocalHamiltonian hn = h.normalized ? h : normalize_hamiltonian(h);
  const std::int64_t p = filter_exponent(hn.n_qubits, hn.b - hn.a);

  // Same draw order as qma_search_one_query so shared streams line up.
  const CliffordElement c = random_clifford(hn.n_qubits, rng);
  const CliffordElement d = random_clifford(hn.n_qubits, rng);
  const Mat cm = c.to_matrix();
  const Mat dm = d.to_matrix();

  // The filter can annihilate the seed outright (every populated branch at
  // eigenvalue 1). The oracle then sees the zero vector, whose sign table is
  // all-plus, and the run reports a miss instead of failing.
  bool survived = true;
  Vec seed = Vec::Zero(dm.rows());
  try {
    seed = filtered_seed_state(hn, dm, p);
  } catch (const std::runtime_error&) {
    survived = false;
  }

  PhaseOracle f = p <= kFilterPowerCap ? qma_oracle_fn(hn, cm, dm, p)
                                       : sign_oracle(cm * seed);
  const StateVector output(cm.adjoint() * build_phase_state(f).amplitudes());

  if (!survived) {
    return QmaExpResult{output, 0.0, std::nan(""), false};
  }
  const double overlap = std::norm(seed.dot(output.amplitudes()));
  const double energy =
      seed.dot(hamiltonian_matrix(hn) * seed).real();
  return QmaExpResult{output, overlap, energy, true};
}

std::optional<QmaSearchResult> qma_search_repeat(const LocalHamiltonian& h,
                                                 int repetitions,
                                                 std::uint64_t seed,
                                                 std::uint64_t base_stream) {
  if (repetitions < 1) {
    throw std::invalid_argument("repetitions must be positive");
  }
  for (int i = 0; i < repetitions; ++i) {
    RngStream rng(seed, base_stream + static_cast<std::uint64_t>(i));
    QmaSearchResult result = qma_search_one_query(h, rng);
    if (!result.aborted) return result;
  }
  return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(int line_no, const std::string& msg) {
  throw std::runtime_error("hamiltonian parse: line " +
                           std::to_string(line_no) + ": " + msg);
}

cplx parse_complex(const std::string& token, int line_no) {
  static const std::regex re(
      R"(^([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)j$)");
  std::smatch m;
  if (!std::regex_match(token, m, re)) {
    parse_fail(line_no,
               "malformed complex number '" + token + "', expected re+imj");
  }
  return cplx(std::stod(m[1].str()), std::stod(m[2].str()));
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_complex(cplx z) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

}  // namespace

LocalHamiltonian parse_hamiltonian(std::istream& in) {
  LocalHamiltonian h;
  bool have_header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty()) continue;

    if (!have_header) {
      std::istringstream iss(body);
      if (!(iss >> h.n_qubits >> h.locality >> h.a >> h.b)) {
        parse_fail(line_no, "expected header 'n k a b'");
      }
      std::string extra;
      if (iss >> extra) parse_fail(line_no, "trailing tokens after header");
      if (h.n_qubits < 1 || h.n_qubits > kMaxDensityQubits) {
        parse_fail(line_no, "qubit count out of range [1, " +
                                std::to_string(kMaxDensityQubits) + "]");
      }
      if (h.locality < 1 || h.locality > h.n_qubits) {
        parse_fail(line_no, "locality out of range [1, n]");
      }
      if (!(h.b > h.a)) parse_fail(line_no, "thresholds need b > a");
      have_header = true;
      continue;
    }

    const auto colon = body.find(':');
    if (colon == std::string::npos) {
      parse_fail(line_no, "expected ':' between qubit list and entries");
    }
    if (body.find(':', colon + 1) != std::string::npos) {
      parse_fail(line_no, "more than one ':' in term line");
    }

    HamiltonianTerm term;
    std::string qubit_part = trim(body.substr(0, colon));
    if (qubit_part.empty()) parse_fail(line_no, "empty qubit list");
    std::istringstream qss(qubit_part);
    std::string piece;
    while (std::getline(qss, piece, ',')) {
      const std::string tok = trim(piece);
      std::size_t used = 0;
      int q = 0;
      try {
        q = std::stoi(tok, &used);
      } catch (const std::exception&) {
        parse_fail(line_no, "bad qubit index '" + tok + "'");
      }
      if (used != tok.size()) {
        parse_fail(line_no, "bad qubit index '" + tok + "'");
      }
      if (q < 0 || q >= h.n_qubits) {
        parse_fail(line_no, "qubit index " + std::to_string(q) +
                                " out of range [0, n)");
      }
      if (!term.qubits.empty() && term.qubits.back() >= q) {
        parse_fail(line_no, "qubit list must be strictly ascending");
      }
      term.qubits.push_back(q);
    }
    const int j = static_cast<int>(term.qubits.size());
    if (j > h.locality) {
      parse_fail(line_no, "term acts on " + std::to_string(j) +
                              " qubits, locality is " +
                              std::to_string(h.locality));
    }

    const Eigen::Index bd = Eigen::Index{1} << j;
    std::vector<cplx> entries;
    std::istringstream ess(body.substr(colon + 1));
    std::string tok;
    while (ess >> tok) entries.push_back(parse_complex(tok, line_no));
    if (static_cast<Eigen::Index>(entries.size()) != bd * bd) {
      parse_fail(line_no, "expected " + std::to_string(bd * bd) +
                              " entries, got " +
                              std::to_string(entries.size()));
    }
    term.block = Mat(bd, bd);
    for (Eigen::Index row = 0; row < bd; ++row) {
      for (Eigen::Index col = 0; col < bd; ++col) {
        term.block(row, col) = entries[static_cast<std::size_t>(row * bd + col)];
      }
    }
    const double herm =
        (term.block - term.block.adjoint()).cwiseAbs().maxCoeff();
    if (herm > default_policy().norm_tol) {
      parse_fail(line_no, "block is not Hermitian");
    }
    h.terms.push_back(std::move(term));
  }
  if (!have_header) {
    parse_fail(line_no + 1, "missing header 'n k a b'");
  }
  validate_hamiltonian(h);
  return h;
}

LocalHamiltonian parse_hamiltonian_text(const std::string& text) {
  std::istringstream in(text);
  return parse_hamiltonian(in);
}

std::string write_hamiltonian(const LocalHamiltonian& h) {
  validate_hamiltonian(h);
  std::ostringstream out;
  out << h.n_qubits << ' ' << h.locality << ' ' << format_double(h.a) << ' '
      << format_double(h.b) << '\n';
  for (const HamiltonianTerm& term : h.terms) {
    for (std::size_t i = 0; i < term.qubits.size(); ++i) {
      if (i > 0) out << ',';
      out << term.qubits[i];
    }
    out << " :";
    for (Eigen::Index row = 0; row < term.block.rows(); ++row) {
      for (Eigen::Index col = 0; col < term.block.cols(); ++col) {
        out << ' ' << format_complex(term.block(row, col));
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace qsynth
