#include "qsynth/classical_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace qsynth {

namespace {

constexpr int kMaxCnfVars = 24;       // exhaustive witness enumeration
constexpr int kMaxOracleVars = 20;    // 2^m truth tables and spectra
constexpr int kMaxPipelineVars = 16;  // repeated hash-extract loops

std::uint32_t var_bit(int var, int num_vars) {
  return std::uint32_t{1} << (num_vars - var);
}

bool parity_odd(std::uint32_t x) {
  return (__builtin_popcount(x) & 1) != 0;
}

// Clause as bitmasks: satisfied iff a positive literal's variable is set or
// a negated literal's variable is clear.
struct ClauseMask {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
};

std::vector<ClauseMask> compile_clauses(const CnfFormula& f) {
  std::vector<ClauseMask> out;
  out.reserve(f.clauses.size());
  for (const auto& clause : f.clauses) {
    ClauseMask m;
    for (int lit : clause) {
      const std::uint32_t bit = var_bit(std::abs(lit), f.num_vars);
      if (lit > 0) {
        m.pos |= bit;
      } else {
        m.neg |= bit;
      }
    }
    out.push_back(m);
  }
  return out;
}

bool masks_satisfied(const std::vector<ClauseMask>& masks, std::uint32_t d) {
  for (const auto& m : masks) {
    if ((d & m.pos) == 0 && (~d & m.neg) == 0) return false;
  }
  return true;
}

void require_vars_at_most(const CnfFormula& f, int cap, const char* op) {
  if (f.num_vars > cap) {
    throw std::invalid_argument(std::string(op) + ": formula has " +
                                std::to_string(f.num_vars) +
                                " variables, cap is " + std::to_string(cap));
  }
}

void validate_hashed(const HashedInstance& h) {
  validate_cnf(h.base);
  if (h.k < 1 || h.k > h.base.num_vars) {
    throw std::invalid_argument("hashed instance: k must lie in [1, num_vars]");
  }
  if (static_cast<int>(h.rows.size()) != h.k) {
    throw std::invalid_argument("hashed instance: expected k parity rows");
  }
  const std::uint32_t mask = (std::uint32_t{1} << h.base.num_vars) - 1;
  for (std::uint32_t row : h.rows) {
    if ((row & ~mask) != 0) {
      throw std::invalid_argument(
          "hashed instance: parity row has bits beyond num_vars");
    }
  }
}

bool hash_rows_ok(const HashedInstance& h, std::uint32_t d) {
  for (std::uint32_t row : h.rows) {
    if (parity_odd(row & d)) return false;
  }
  return true;
}

PhaseOracle oracle_from_witnesses(int num_vars,
                                  const std::vector<std::uint32_t>& witnesses) {
  const std::size_t dim = std::size_t{1} << num_vars;
  std::vector<std::uint8_t> table(dim, 0);
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint32_t d : witnesses) {
      if (parity_odd(static_cast<std::uint32_t>(x) & d)) {
        table[x] = 1;
        break;
      }
    }
  }
  return PhaseOracle(num_vars, std::move(table));
}

PhaseOracle linear_oracle(int num_vars, std::uint32_t d) {
  const std::size_t dim = std::size_t{1} << num_vars;
  std::vector<std::uint8_t> table(dim, 0);
  for (std::uint64_t x = 0; x < dim; ++x) {
    table[x] = parity_odd(static_cast<std::uint32_t>(x) & d) ? 1 : 0;
  }
  return PhaseOracle(num_vars, std::move(table));
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw std::runtime_error("dimacs parse: line " + std::to_string(line) +
                           ": " + msg);
}

}  // namespace

void validate_cnf(const CnfFormula& f) {
  if (f.num_vars < 1 || f.num_vars > kMaxCnfVars) {
    throw std::invalid_argument("cnf: num_vars must lie in [1, " +
                                std::to_string(kMaxCnfVars) + "]");
  }
  for (const auto& clause : f.clauses) {
    for (int lit : clause) {
      if (lit == 0 || std::abs(lit) > f.num_vars) {
        throw std::invalid_argument(
            "cnf: literal " + std::to_string(lit) +
            " out of range for " + std::to_string(f.num_vars) + " variables");
      }
    }
  }
}

bool literal_true(int literal, std::uint32_t assignment, int num_vars) {
  if (literal == 0 || std::abs(literal) > num_vars) {
    throw std::invalid_argument("literal out of range");
  }
  const bool set = (assignment & var_bit(std::abs(literal), num_vars)) != 0;
  return literal > 0 ? set : !set;
}

bool cnf_satisfied(const CnfFormula& f, std::uint32_t assignment) {
  validate_cnf(f);
  return masks_satisfied(compile_clauses(f), assignment);
}

std::vector<std::uint32_t> enumerate_witnesses(const CnfFormula& f) {
  validate_cnf(f);
  const auto masks = compile_clauses(f);
  const std::uint64_t dim = std::uint64_t{1} << f.num_vars;
  std::vector<std::uint32_t> out;
  for (std::uint64_t d = 0; d < dim; ++d) {
    if (masks_satisfied(masks, static_cast<std::uint32_t>(d))) {
      out.push_back(static_cast<std::uint32_t>(d));
    }
  }
  return out;
}

bool witness_oracle(const CnfFormula& f,
                    const std::function<bool(std::uint32_t)>& predicate) {
  validate_cnf(f);
  const auto masks = compile_clauses(f);
  const std::uint64_t dim = std::uint64_t{1} << f.num_vars;
  for (std::uint64_t d = 0; d < dim; ++d) {
    const auto w = static_cast<std::uint32_t>(d);
    if (!masks_satisfied(masks, w)) continue;
    if (!predicate || predicate(w)) return true;
  }
  return false;
}

bool hashed_witness_ok(const HashedInstance& h, std::uint32_t d) {
  validate_hashed(h);
  return cnf_satisfied(h.base, d) && hash_rows_ok(h, d);
}

std::vector<std::uint32_t> hashed_witnesses(const HashedInstance& h) {
  validate_hashed(h);
  std::vector<std::uint32_t> out;
  for (std::uint32_t d : enumerate_witnesses(h.base)) {
    if (hash_rows_ok(h, d)) out.push_back(d);
  }
  return out;
}

HashedInstance vv_hash(const CnfFormula& base, RngStream& rng) {
  validate_cnf(base);
  const int m = base.num_vars;
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  HashedInstance h;
  h.base = base;
  h.k = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(m)));
  h.rows.reserve(h.k);
  for (int i = 0; i < h.k; ++i) {
    h.rows.push_back(static_cast<std::uint32_t>(rng.next_u64()) & mask);
  }
  return h;
}

PhaseOracle qcma_oracle_fn(const HashedInstance& h) {
  validate_hashed(h);
  require_vars_at_most(h.base, kMaxOracleVars, "qcma_oracle_fn");
  return oracle_from_witnesses(h.base.num_vars, hashed_witnesses(h));
}

PhaseOracle qcma_oracle_fn(const HashedInstance& h,
                           const std::vector<std::uint32_t>& base_witnesses) {
  validate_hashed(h);
  require_vars_at_most(h.base, kMaxOracleVars, "qcma_oracle_fn");
  std::vector<std::uint32_t> survivors;
  for (std::uint32_t d : base_witnesses) {
    if (hash_rows_ok(h, d)) survivors.push_back(d);
  }
  return oracle_from_witnesses(h.base.num_vars, survivors);
}

std::uint32_t bv_extract(const PhaseOracle& f, RngStream& rng) {
  const int m = f.n_bits();
  if (m < 1 || m > kMaxOracleVars) {
    throw std::invalid_argument("bv_extract: oracle must have 1..20 bits");
  }
  const std::size_t dim = std::size_t{1} << m;

  // Walsh spectrum of the signs (-1)^f(x). Entries stay integers bounded by
  // 2^m, so the Born weights spectrum[y]^2 / 4^m are exact.
  std::vector<std::int64_t> spectrum(dim);
  for (std::uint64_t x = 0; x < dim; ++x) {
    spectrum[x] = f.value(x) ? -1 : 1;
  }
  for (std::size_t len = 1; len < dim; len <<= 1) {
    for (std::size_t block = 0; block < dim; block += 2 * len) {
      for (std::size_t i = block; i < block + len; ++i) {
        const std::int64_t a = spectrum[i];
        const std::int64_t b = spectrum[i + len];
        spectrum[i] = a + b;
        spectrum[i + len] = a - b;
      }
    }
  }

  // Parseval: the squared spectrum sums to exactly 4^m (< 2^53 for m <= 20),
  // so a uniform draw scaled by 4^m lands in exactly one cumulative bucket.
  const double total = std::ldexp(1.0, 2 * m);
  const double target = rng.uniform() * total;
  std::int64_t cumulative = 0;
  for (std::uint64_t y = 0; y < dim; ++y) {
    cumulative += spectrum[y] * spectrum[y];
    if (static_cast<double>(cumulative) > target) {
      return static_cast<std::uint32_t>(y);
    }
  }
  return static_cast<std::uint32_t>(dim - 1);
}

std::optional<std::uint32_t> extract_from_hashed(const HashedInstance& h,
                                                 RngStream& rng) {
  return extract_from_hashed(h, enumerate_witnesses(h.base), rng);
}

std::optional<std::uint32_t> extract_from_hashed(
    const HashedInstance& h, const std::vector<std::uint32_t>& base_witnesses,
    RngStream& rng) {
  const PhaseOracle f = qcma_oracle_fn(h, base_witnesses);
  const std::uint32_t d = bv_extract(f, rng);
  if (cnf_satisfied(h.base, d)) return d;
  return std::nullopt;
}

std::optional<std::uint32_t> search_to_decision(const CnfFormula& base,
                                                RngStream& rng) {
  validate_cnf(base);
  require_vars_at_most(base, kMaxPipelineVars, "search_to_decision");
  const auto witnesses = enumerate_witnesses(base);
  return extract_from_hashed(vv_hash(base, rng), witnesses, rng);
}

std::optional<std::uint32_t> amplify(const CnfFormula& base, int t,
                                     RngStream& rng) {
  validate_cnf(base);
  require_vars_at_most(base, kMaxPipelineVars, "amplify");
  if (t < 0) throw std::invalid_argument("amplify: t must be nonnegative");
  const auto witnesses = enumerate_witnesses(base);
  const int runs = static_cast<int>(
      std::ceil(kAmplifyRunsPerBit * (base.num_vars + t)));
  for (int i = 0; i < runs; ++i) {
    const auto result = extract_from_hashed(vv_hash(base, rng), witnesses, rng);
    if (result) return result;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> lex_first_extract(const CnfFormula& base) {
  validate_cnf(base);
  require_vars_at_most(base, kMaxOracleVars, "lex_first_extract");
  if (!witness_oracle(base)) return std::nullopt;

  // Fix variables most significant first, preferring 0 whenever a witness
  // with the extended prefix still exists.
  std::uint32_t decided_mask = 0;
  std::uint32_t decided_value = 0;
  for (int var = 1; var <= base.num_vars; ++var) {
    const std::uint32_t bit = var_bit(var, base.num_vars);
    decided_mask |= bit;
    const std::uint32_t want = decided_value;  // candidate bit stays 0
    const bool zero_ok = witness_oracle(base, [&](std::uint32_t d) {
      return (d & decided_mask) == want;
    });
    if (!zero_ok) decided_value |= bit;
  }

  // The linear oracle x . d_lex collapses the extraction to a single
  // outcome, so the measurement is deterministic.
  RngStream rng(0, 0);
  const std::uint32_t extracted =
      bv_extract(linear_oracle(base.num_vars, decided_value), rng);
  if (extracted != decided_value) {
    throw std::runtime_error(
        "lex_first_extract: extraction disagreed with the descent");
  }
  return decided_value;
}

PlantedInstance planted_3sat(int num_vars, int num_clauses, RngStream& rng) {
  if (num_vars < 3 || num_vars > kMaxCnfVars) {
    throw std::invalid_argument("planted_3sat: num_vars must lie in [3, 24]");
  }
  if (num_clauses < 0) {
    throw std::invalid_argument("planted_3sat: num_clauses must be >= 0");
  }
  PlantedInstance inst;
  inst.formula.num_vars = num_vars;
  inst.planted = static_cast<std::uint32_t>(rng.next_u64()) &
                 ((std::uint32_t{1} << num_vars) - 1);
  inst.formula.clauses.reserve(num_clauses);
  for (int c = 0; c < num_clauses; ++c) {
    int vars[3];
    for (int i = 0; i < 3; ++i) {
      for (;;) {
        vars[i] = 1 + static_cast<int>(
                          rng.uniform_below(static_cast<std::uint64_t>(num_vars)));
        if ((i < 1 || vars[i] != vars[0]) && (i < 2 || vars[i] != vars[1])) {
          break;
        }
      }
    }
    // Resample signs until the planted assignment satisfies the clause
    // (rejects with probability 1/8 per attempt).
    std::vector<int> clause(3);
    for (;;) {
      bool satisfied = false;
      for (int i = 0; i < 3; ++i) {
        clause[i] = rng.bernoulli(0.5) ? vars[i] : -vars[i];
        if (literal_true(clause[i], inst.planted, num_vars)) satisfied = true;
      }
      if (satisfied) break;
    }
    inst.formula.clauses.push_back(clause);
  }
  return inst;
}

CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  bool saw_header = false;
  long declared_clauses = 0;
  std::string line;
  int line_no = 0;
  int last_line = 0;

  while (std::getline(in, line)) {
    ++line_no;
    last_line = line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;        // blank line
    if (first == "c") continue;          // comment

    if (!saw_header) {
      if (first != "p") parse_fail(line_no, "expected 'p cnf' header");
      std::string kind;
      long vars = 0;
      if (!(ls >> kind >> vars >> declared_clauses) || kind != "cnf") {
        parse_fail(line_no, "malformed 'p cnf <vars> <clauses>' header");
      }
      std::string extra;
      if (ls >> extra) parse_fail(line_no, "trailing tokens after header");
      if (vars < 1 || vars > kMaxCnfVars) {
        parse_fail(line_no, "variable count must lie in [1, " +
                                std::to_string(kMaxCnfVars) + "]");
      }
      if (declared_clauses < 0) parse_fail(line_no, "negative clause count");
      f.num_vars = static_cast<int>(vars);
      saw_header = true;
      continue;
    }

    if (static_cast<long>(f.clauses.size()) == declared_clauses) {
      parse_fail(line_no, "more clauses than the header declared");
    }
    std::vector<int> clause;
    if (first != "0") {
      // Reparse the line as integers, first token included.
      std::istringstream body(line);
      int lit = 0;
      bool terminated = false;
      while (body >> lit) {
        if (terminated) parse_fail(line_no, "tokens after the terminating 0");
        if (lit == 0) {
          terminated = true;
          continue;
        }
        if (std::abs(lit) > f.num_vars) {
          parse_fail(line_no, "literal " + std::to_string(lit) +
                                  " exceeds the declared variable count");
        }
        clause.push_back(lit);
      }
      if (!body.eof()) parse_fail(line_no, "non-integer token in clause");
      if (!terminated) parse_fail(line_no, "clause line must end with 0");
    } else {
      std::string extra;
      if (ls >> extra) parse_fail(line_no, "tokens after the terminating 0");
    }
    f.clauses.push_back(std::move(clause));
  }

  if (!saw_header) parse_fail(last_line + 1, "missing 'p cnf' header");
  if (static_cast<long>(f.clauses.size()) != declared_clauses) {
    parse_fail(last_line + 1,
               "expected " + std::to_string(declared_clauses) + " clauses, got " +
                   std::to_string(f.clauses.size()));
  }
  validate_cnf(f);
  return f;
}

CnfFormula parse_dimacs_text(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

}  // namespace qsynth
