#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsynth/phase_states.hpp"
#include "qsynth/rng.hpp"

namespace qsynth {

// CNF formula over num_vars variables, clauses as signed 1-based literals.
// Assignments are packed into a word with variable 1 as the most significant
// bit, so lexicographic order on witness strings is numeric order on words.
// An empty clause is allowed and marks the formula unsatisfiable.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

// Structural checks: 1 <= num_vars <= 24 (exhaustive-search scale), every
// literal nonzero with |lit| <= num_vars. Throws invalid_argument.
void validate_cnf(const CnfFormula& f);

bool literal_true(int literal, std::uint32_t assignment, int num_vars);
bool cnf_satisfied(const CnfFormula& f, std::uint32_t assignment);

// All satisfying assignments in increasing (= lexicographic) order.
std::vector<std::uint32_t> enumerate_witnesses(const CnfFormula& f);

// Decision oracle: does a witness exist (optionally further constrained)?
bool witness_oracle(const CnfFormula& f,
                    const std::function<bool(std::uint32_t)>& predicate = {});

// CNF instance sharpened by a random parity constraint A d = 0.
struct HashedInstance {
  CnfFormula base;
  int k = 0;                       // number of parity rows, in [1, num_vars]
  std::vector<std::uint32_t> rows; // each row is an num_vars-bit mask
};

// d satisfies the base and every row parity <row, d> = 0.
bool hashed_witness_ok(const HashedInstance& h, std::uint32_t d);
std::vector<std::uint32_t> hashed_witnesses(const HashedInstance& h);

// Isolation hash: k uniform in {1..num_vars}, rows uniform over GF(2) masks.
HashedInstance vv_hash(const CnfFormula& base, RngStream& rng);

// Truth table f(x) = 1 iff some hashed witness d has odd parity <x, d>.
// With a unique hashed witness d0 this is exactly the linear map x . d0.
// The second form reuses a precomputed base witness list (skips the
// exhaustive enumeration, which dominates repeated-pipeline loops).
PhaseOracle qcma_oracle_fn(const HashedInstance& h);
PhaseOracle qcma_oracle_fn(const HashedInstance& h,
                           const std::vector<std::uint32_t>& base_witnesses);

// Simulates H^m O_f H^m |0^m> and measures: the Walsh spectrum of the signs
// (-1)^f(x) in exact integer arithmetic, sampled by the Born rule. Under the
// linear promise f(x) = x . d the outcome is d with probability 1; otherwise
// the measured string is returned as-is for downstream verification.
std::uint32_t bv_extract(const PhaseOracle& f, RngStream& rng);

// Post-hash pipeline: build the oracle, extract, verify against the base.
// Returns the witness only if it satisfies the base formula.
std::optional<std::uint32_t> extract_from_hashed(const HashedInstance& h,
                                                 RngStream& rng);
std::optional<std::uint32_t> extract_from_hashed(
    const HashedInstance& h, const std::vector<std::uint32_t>& base_witnesses,
    RngStream& rng);

// One-query search: hash, extract, verify. Succeeds with probability
// Omega(1/num_vars) on satisfiable instances; never returns a
// non-satisfying assignment.
std::optional<std::uint32_t> search_to_decision(const CnfFormula& base,
                                                RngStream& rng);

// Empirical per-run success of search_to_decision on planted 3-SAT at
// clause ratio 4 is (1.8..2.0)/num_vars for num_vars in 8..14, measured at
// 8000+ trials per size. Frozen floor with margin below every measurement;
// the guarantee behind it is only Omega(1/num_vars).
inline constexpr double kSearchSuccessConstant = 1.5;

// ceil(kAmplifyRunsPerBit * (num_vars + t)) pipelines drive the measured
// amplify failure rate to ~0.003 at num_vars = 12, t = 5, an order of
// magnitude under the 2^-t target.
inline constexpr double kAmplifyRunsPerBit = 2.0;

// Independent pipelines until the first verified witness; empirical
// failure <= 2^-t on planted ensembles.
std::optional<std::uint32_t> amplify(const CnfFormula& base, int t,
                                     RngStream& rng);

// Exact lexicographically-first witness, or nullopt when unsatisfiable.
// Runs the bitwise decision-oracle descent, then confirms by extraction on
// the linear oracle x . d_lex (deterministic under the linear promise).
std::optional<std::uint32_t> lex_first_extract(const CnfFormula& base);

// Random 3-SAT with a planted satisfying assignment (clauses are resampled
// until the planted witness survives each one).
struct PlantedInstance {
  CnfFormula formula;
  std::uint32_t planted = 0;
};
PlantedInstance planted_3sat(int num_vars, int num_clauses, RngStream& rng);

// Strict DIMACS reader: 'c' comment lines, a 'p cnf <vars> <clauses>'
// header, then one zero-terminated clause per line. Malformed input is a
// hard error naming the line.
CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs_text(const std::string& text);

}  // namespace qsynth
