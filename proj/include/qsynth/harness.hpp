#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qsynth {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Configuration mistakes a caller can fix (bad flag values, missing files).
// The CLI maps these to exit code 2; everything else exits 1.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One experiment = one subcommand invocation. Fields outside the chosen
// subcommand's set are ignored (and excluded from its config hash).
struct ExperimentConfig {
  std::string subcommand;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string output_path;  // prefix for <path>.csv / <path>.json; empty = none

  int n = 0;           // target qubits; extract: planted variable count
  int n_expanded = 0;  // 0 = n + 4 where a working register applies
  int m = 0;           // register count (synth-one, distill)
  int rounds = -1;     // distill; -1 = auto_rounds(m, n)
  double a = 0.5;      // distill initial overlap
  double gamma = 0.125;          // ensembles-check threshold parameter
  int phase_bits = 24;           // synth-adaptive, synth-two
  int prob_bits = 24;            // synth-adaptive
  bool exact = false;            // synth-adaptive: infinite precision
  std::string mode = "sampled";  // distill: "sampled" | "exact"
  std::string hamiltonian_path;  // qma, qma-exp
  std::string dimacs_path;       // extract; empty = planted 3-SAT per trial
  int clauses = 0;               // extract planted; 0 = 4n
  int t = -1;                    // extract: amplify bits; -1 = single pipeline
  int d = 0;                     // wasserstein-check sample count
};

// Harness-level validation (subcommand known, trials >= 1, required inputs
// present). Module caps surface verbatim from the modules themselves.
void validate_config(const ExperimentConfig& config);

struct RunRecord {
  std::vector<std::string> csv_header;
  // One row per trial, cells preformatted (%.17g) so serialization is
  // byte-stable across platforms and worker counts.
  std::vector<std::vector<std::string>> csv_rows;
  nlohmann::json summary;
};

// Canonical FNV-1a hash of the subcommand-relevant fields, 16 hex digits.
// Output path is provenance, not identity, and stays out of the hash.
std::string config_hash(const ExperimentConfig& config);

std::string csv_text(const RunRecord& record);

// Runs the experiment: dispatches on subcommand, executes trials in a
// worker pool (trial i always consumes RngStream(seed, i) or a seed mixed
// from (seed, i), independent of scheduling), computes summary statistics,
// and writes <output_path>.csv and <output_path>.json when a path is set.
// Worker count comes from QSYNTH_WORKERS when set, else the hardware.
RunRecord run(const ExperimentConfig& config);

}  // namespace qsynth
