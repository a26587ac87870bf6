#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "qsynth/harness.hpp"

namespace {

void add_common(CLI::App* cmd, qsynth::ExperimentConfig& cfg) {
  cmd->add_option("--trials", cfg.trials, "trial count")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "master seed; trial i uses stream i")
      ->capture_default_str();
  cmd->add_option("--out", cfg.output_path,
                  "output prefix, written as <prefix>.csv and <prefix>.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oracle-driven state synthesis experiment runner"};
  app.require_subcommand(1);

  qsynth::ExperimentConfig cfg;

  auto* adaptive = app.add_subcommand(
      "synth-adaptive", "stage-by-stage baseline synthesis from queries");
  adaptive->add_option("--n", cfg.n, "target qubits")->required();
  adaptive->add_option("--prob-bits", cfg.prob_bits, "probability precision")
      ->capture_default_str();
  adaptive->add_option("--phase-bits", cfg.phase_bits, "phase precision")
      ->capture_default_str();
  adaptive->add_flag("--exact", cfg.exact, "disable rounding");
  add_common(adaptive, cfg);

  auto* one = app.add_subcommand("synth-one",
                                 "one-query synthesis plus distillation");
  one->add_option("--n", cfg.n, "target qubits")->required();
  one->add_option("--n-expanded", cfg.n_expanded,
                  "working register qubits (0 = n + 4)")
      ->capture_default_str();
  one->add_option("--m", cfg.m, "register count (0 = 96)")
      ->capture_default_str();
  add_common(one, cfg);

  auto* two = app.add_subcommand("synth-two",
                                 "two-query permutation-phase synthesis");
  two->add_option("--n", cfg.n, "target qubits")->required();
  two->add_option("--n-expanded", cfg.n_expanded,
                  "working register qubits (0 = n + 4)")
      ->capture_default_str();
  two->add_option("--phase-bits", cfg.phase_bits, "oracle phase precision")
      ->capture_default_str();
  add_common(two, cfg);

  auto* distill = app.add_subcommand(
      "distill", "pairwise swap-test distillation, orthogonal-noise model");
  distill->add_option("--m", cfg.m, "input register count")->required();
  distill->add_option("--n", cfg.n, "register qubits (sets auto rounds)")
      ->required();
  distill->add_option("--a", cfg.a, "initial overlap")->capture_default_str();
  distill->add_option("--rounds", cfg.rounds, "round count (-1 = auto)")
      ->capture_default_str();
  distill->add_option("--mode", cfg.mode, "sampled | exact")
      ->capture_default_str();
  add_common(distill, cfg);

  auto* qma = app.add_subcommand(
      "qma", "filtered one-query witness search with energy readout");
  qma->add_option("--hamiltonian", cfg.hamiltonian_path,
                  "local Hamiltonian text file")
      ->required();
  add_common(qma, cfg);

  auto* qma_exp = app.add_subcommand(
      "qma-exp", "gate-free filtered search (never aborts)");
  qma_exp
      ->add_option("--hamiltonian", cfg.hamiltonian_path,
                   "local Hamiltonian text file")
      ->required();
  add_common(qma_exp, cfg);

  auto* extract = app.add_subcommand(
      "extract", "hash-extract-verify witness search on CNF instances");
  extract->add_option("--dimacs", cfg.dimacs_path,
                      "CNF file (omit for planted 3-SAT)");
  extract->add_option("--n", cfg.n, "planted instance variables")
      ->capture_default_str();
  extract->add_option("--clauses", cfg.clauses, "planted clauses (0 = 4n)")
      ->capture_default_str();
  extract->add_option("--t", cfg.t, "amplification bits (-1 = single run)")
      ->capture_default_str();
  add_common(extract, cfg);

  auto* ens = app.add_subcommand(
      "ensembles-check", "phase-state overlap rate under Clifford twirls");
  ens->add_option("--n", cfg.n, "register qubits")->required();
  ens->add_option("--gamma", cfg.gamma, "overlap threshold")
      ->capture_default_str();
  add_common(ens, cfg);

  auto* wass = app.add_subcommand(
      "wasserstein-check", "empirical transport distance to the Rayleigh law");
  wass->add_option("--d", cfg.d, "samples per trial")->required();
  add_common(wass, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    const qsynth::RunRecord record = qsynth::run(cfg);
    std::printf("%s\n", record.summary.dump(2).c_str());
    return 0;
  } catch (const qsynth::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
