#include "qsynth/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "qsynth/adaptive.hpp"
#include "qsynth/classical_search.hpp"
#include "qsynth/distill.hpp"
#include "qsynth/ensembles.hpp"
#include "qsynth/one_query.hpp"
#include "qsynth/phase_states.hpp"
#include "qsynth/qcore.hpp"
#include "qsynth/qma_search.hpp"
#include "qsynth/stats.hpp"
#include "qsynth/two_query.hpp"

namespace qsynth {

namespace {

using nlohmann::json;

std::string format_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Per-trial seed for pipelines that consume whole stream families
// internally (one-query uses streams 0..m from its own seed).
std::uint64_t mix_seed(std::uint64_t seed, int trial) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ull *
                            (static_cast<std::uint64_t>(trial) + 1)));
}

int resolve_workers() {
  if (const char* env = std::getenv("QSYNTH_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 64) {
      throw UsageError("QSYNTH_WORKERS must be an integer in [1, 64]");
    }
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hw == 0 ? 1u : hw, 8u));
}

// Trials claim indices from a shared counter; results land by index, so the
// outcome is independent of scheduling. The trial function must derive all
// randomness from its index.
std::vector<std::vector<double>> run_trials(
    int trials, int workers,
    const std::function<std::vector<double>(int)>& trial_fn) {
  std::vector<std::vector<double>> results(trials);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        results[i] = trial_fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const int pool = std::min(workers, trials);
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int w = 0; w < pool; ++w) threads.emplace_back(work);
    for (auto& th : threads) th.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

json rate_json(int successes, int trials) {
  const auto w = wilson95(successes, trials);
  return json{{"rate", static_cast<double>(successes) / trials},
              {"successes", successes},
              {"wilson_low", w.low},
              {"wilson_high", w.high}};
}

std::vector<double> column(const std::vector<std::vector<double>>& rows,
                           std::size_t idx) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

struct RunnerOutput {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  json stats;
};

// ---- subcommand runners ----------------------------------------------

RunnerOutput run_synth_adaptive(const ExperimentConfig& c, int workers) {
  const PrecisionPolicy policy = c.exact
                                     ? PrecisionPolicy::exact_policy()
                                     : PrecisionPolicy{c.prob_bits, c.phase_bits,
                                                       false};
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const StateVector target = haar_state(c.n, rng);
    const AdaptiveResult res = synthesize_adaptive(target, policy);
    const double infidelity = 1.0 - overlap(res.output, target);
    return std::vector<double>{static_cast<double>(i), infidelity,
                               static_cast<double>(res.query_count)};
  });
  const auto infid = column(rows, 1);
  json stats{{"mean_infidelity", mean(infid)},
             {"median_infidelity", median(infid)},
             {"max_infidelity", *std::max_element(infid.begin(), infid.end())},
             {"query_count", rows.front()[2]}};
  return {{"trial", "infidelity", "queries"}, std::move(rows), std::move(stats)};
}

RunnerOutput run_synth_one(const ExperimentConfig& c, int workers) {
  const int n_expanded = c.n_expanded > 0 ? c.n_expanded : c.n + 4;
  const double cross_cap =
      std::pow(static_cast<double>(std::int64_t{1} << n_expanded), -0.25);
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const StateVector target = haar_state(c.n, rng);
    OneQueryConfig oc;
    oc.n_target = c.n;
    oc.n_expanded = n_expanded;
    oc.m = c.m > 0 ? c.m : 96;
    oc.seed = mix_seed(c.seed, i);
    const OneQueryResult res = one_query_synthesize(target, oc);
    const bool precond = res.conditions.min_overlap >= 0.125 &&
                         res.conditions.max_cross <= cross_cap;
    return std::vector<double>{static_cast<double>(i),
                               res.aborted ? 1.0 : 0.0,
                               res.output_overlap,
                               res.expanded_overlap,
                               res.mean_register_overlap,
                               res.conditions.min_overlap,
                               res.conditions.max_cross,
                               precond ? 1.0 : 0.0};
  });
  int aborts = 0;
  int precond_ok = 0;
  int beats_mean = 0;
  std::vector<double> finals;
  for (const auto& r : rows) {
    if (r[1] != 0.0) {
      ++aborts;
    } else {
      finals.push_back(r[2]);
      if (r[3] > r[4]) ++beats_mean;
    }
    if (r[7] != 0.0) ++precond_ok;
  }
  const int alive = c.trials - aborts;
  json stats{{"abort", rate_json(aborts, c.trials)},
             {"preconditions", rate_json(precond_ok, c.trials)},
             {"cross_cap", cross_cap},
             {"mean_final_overlap", finals.empty() ? json() : json(mean(finals))},
             {"beats_single_register",
              alive > 0 ? json(rate_json(beats_mean, alive)) : json()}};
  return {{"trial", "aborted", "output_overlap", "expanded_overlap",
           "mean_register_overlap", "min_overlap", "max_cross",
           "preconditions_ok"},
          std::move(rows),
          std::move(stats)};
}

RunnerOutput run_synth_two(const ExperimentConfig& c, int workers) {
  const int n_expanded = c.n_expanded > 0 ? c.n_expanded : c.n + 4;
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const StateVector target = haar_state(c.n, rng);
    const TwoQueryResult res =
        two_query_synthesize(target, n_expanded, c.phase_bits, rng);
    return std::vector<double>{static_cast<double>(i), res.sorted_distance,
                               res.fidelity, 1.0 - res.fidelity,
                               res.expanded_fidelity};
  });
  json stats{{"median_sorted_distance", median(column(rows, 1))},
             {"median_infidelity", median(column(rows, 3))},
             {"mean_fidelity", mean(column(rows, 2))},
             {"n_expanded", n_expanded}};
  return {{"trial", "sorted_distance", "fidelity", "infidelity",
           "expanded_fidelity"},
          std::move(rows),
          std::move(stats)};
}

RunnerOutput run_distill(const ExperimentConfig& c, int workers) {
  // The scalar model demands an explicit positive round count, so the auto
  // resolution runs at least one round even when m < 6n.
  const int rounds =
      c.rounds >= 0 ? c.rounds : std::max(1, auto_rounds(c.m, c.n));
  DistillationConfig dc;
  dc.m = c.m;
  dc.rounds = rounds;
  dc.mode = c.mode == "exact" ? DistillMode::exact_conditional
                              : DistillMode::sampled;
  const std::vector<double> overlaps(c.m, c.a);
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const ScalarDistillationReport rep = distill_orthogonal(overlaps, dc, rng);
    const double final_min =
        rep.aborted ? std::nan("")
                    : *std::min_element(rep.final_overlaps.begin(),
                                        rep.final_overlaps.end());
    return std::vector<double>{
        static_cast<double>(i),
        rep.aborted ? 1.0 : 0.0,
        static_cast<double>(rep.survivor_counts.back()),
        static_cast<double>(rep.survivor_counts.size() - 1),
        final_min,
        rep.all_success_probability};
  });
  int aborts = 0;
  std::vector<double> finals;
  for (const auto& r : rows) {
    if (r[1] != 0.0) {
      ++aborts;
    } else {
      finals.push_back(r[4]);
    }
  }
  const auto bound = survival_bound(c.m, c.n);
  json stats{{"abort", rate_json(aborts, c.trials)},
             {"rounds", rounds},
             {"overlap_bound", overlap_bound(c.a, rounds)},
             {"abort_bound", bound ? json(*bound) : json()},
             {"mean_final_overlap", finals.empty() ? json() : json(mean(finals))},
             {"min_final_overlap",
              finals.empty()
                  ? json()
                  : json(*std::min_element(finals.begin(), finals.end()))}};
  return {{"trial", "aborted", "survivors", "rounds_executed",
           "min_final_overlap", "all_success_probability"},
          std::move(rows),
          std::move(stats)};
}

LocalHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open hamiltonian file: " + path);
  try {
    return parse_hamiltonian(in);
  } catch (const std::runtime_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

RunnerOutput run_qma(const ExperimentConfig& c, int workers) {
  const LocalHamiltonian h = load_hamiltonian(c.hamiltonian_path);
  const LocalHamiltonian hn = normalize_hamiltonian(h);
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const QmaSearchResult res = qma_search_one_query(hn, rng);
    return std::vector<double>{
        static_cast<double>(i), res.aborted ? 0.0 : 1.0, res.theta,
        res.aborted ? std::nan("") : res.witness_energy};
  });
  int accepts = 0;
  std::vector<double> energies;
  for (const auto& r : rows) {
    if (r[1] != 0.0) {
      ++accepts;
      energies.push_back(r[3]);
    }
  }
  const int m_bits = energy_estimate_bits(hn.b - hn.a);
  json stats{{"non_abort", rate_json(accepts, c.trials)},
             {"abort_floor", 1.0 / 1024.0},
             {"mean_witness_energy",
              energies.empty() ? json() : json(mean(energies))},
             {"acceptance_threshold", acceptance_threshold(hn, m_bits)},
             {"midpoint", 0.5 * (hn.a + hn.b)},
             {"energy_bits", m_bits}};
  return {{"trial", "accepted", "theta", "witness_energy"},
          std::move(rows),
          std::move(stats)};
}

RunnerOutput run_qma_exp(const ExperimentConfig& c, int workers) {
  const LocalHamiltonian h = load_hamiltonian(c.hamiltonian_path);
  const LocalHamiltonian hn = normalize_hamiltonian(h);
  const double midpoint = 0.5 * (hn.a + hn.b);
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const QmaExpResult res = qma_exp_search(hn, rng);
    const bool joint = res.filter_survived && res.filtered_energy <= midpoint &&
                       res.filtered_overlap >= 0.25;
    return std::vector<double>{static_cast<double>(i), res.filtered_overlap,
                               res.filtered_energy, joint ? 1.0 : 0.0,
                               res.filter_survived ? 1.0 : 0.0};
  });
  int joint = 0;
  int survived = 0;
  std::vector<double> energies;
  for (const auto& r : rows) {
    if (r[3] != 0.0) ++joint;
    if (r[4] != 0.0) {
      ++survived;
      energies.push_back(r[2]);
    }
  }
  json stats{{"mean_overlap", mean(column(rows, 1))},
             {"median_overlap", median(column(rows, 1))},
             {"mean_energy", energies.empty() ? json() : json(mean(energies))},
             {"filter_survival", rate_json(survived, c.trials)},
             {"joint_success", rate_json(joint, c.trials)},
             {"midpoint", midpoint}};
  return {{"trial", "filtered_overlap", "filtered_energy", "joint_success",
           "filter_survived"},
          std::move(rows),
          std::move(stats)};
}

RunnerOutput run_extract(const ExperimentConfig& c, int workers) {
  CnfFormula fixed;
  const bool planted = c.dimacs_path.empty();
  if (!planted) {
    std::ifstream in(c.dimacs_path);
    if (!in) throw UsageError("cannot open dimacs file: " + c.dimacs_path);
    try {
      fixed = parse_dimacs(in);
    } catch (const std::runtime_error& e) {
      throw UsageError(c.dimacs_path + ": " + e.what());
    }
  }
  const int clauses = c.clauses > 0 ? c.clauses : 4 * c.n;
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const CnfFormula base =
        planted ? planted_3sat(c.n, clauses, rng).formula : fixed;
    const auto result = c.t >= 0 ? amplify(base, c.t, rng)
                                 : search_to_decision(base, rng);
    return std::vector<double>{
        static_cast<double>(i), result ? 1.0 : 0.0,
        result ? static_cast<double>(*result) : -1.0};
  });
  int hits = 0;
  for (const auto& r : rows) {
    if (r[1] != 0.0) ++hits;
  }
  const int num_vars = planted ? c.n : fixed.num_vars;
  json stats{{"success", rate_json(hits, c.trials)},
             {"fitted_c", static_cast<double>(hits) / c.trials * num_vars},
             {"num_vars", num_vars},
             {"mode", c.t >= 0 ? "amplify" : "search"},
             {"t", c.t}};
  return {{"trial", "success", "witness"}, std::move(rows), std::move(stats)};
}

RunnerOutput run_ensembles_check(const ExperimentConfig& c, int workers) {
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    const StateVector tau = haar_state(c.n, rng);
    const Mat cm = random_clifford(c.n, rng).to_matrix();
    const Vec w = cm * tau.amplitudes();
    const BestPhaseOracle best = best_phase_oracle(w.real());
    const double ov = std::norm(build_phase_state(best.f).amplitudes().dot(w));
    return std::vector<double>{static_cast<double>(i), ov,
                               ov >= c.gamma ? 1.0 : 0.0};
  });
  int hits = 0;
  for (const auto& r : rows) {
    if (r[2] != 0.0) ++hits;
  }
  json stats{{"hit", rate_json(hits, c.trials)},
             {"gamma", c.gamma},
             {"guaranteed_rate", 0.5 - 2.0 * c.gamma},
             {"mean_overlap", mean(column(rows, 1))}};
  return {{"trial", "overlap_sq", "hit"}, std::move(rows), std::move(stats)};
}

RunnerOutput run_wasserstein_check(const ExperimentConfig& c, int workers) {
  auto rows = run_trials(c.trials, workers, [&](int i) {
    RngStream rng(c.seed, static_cast<std::uint64_t>(i));
    std::vector<double> samples(c.d);
    for (auto& s : samples) s = std::abs(rng.complex_gaussian());
    const double w2 = empirical_wasserstein2(samples, ReferenceLaw::rayleigh);
    return std::vector<double>{static_cast<double>(i), w2, w2 * w2};
  });
  const double mean_sq = mean(column(rows, 2));
  json stats{{"mean_w2_sq", mean_sq},
             {"fitted_c", mean_sq * c.d / std::log(static_cast<double>(c.d))},
             {"d", c.d}};
  return {{"trial", "w2", "w2_sq"}, std::move(rows), std::move(stats)};
}

json config_json(const ExperimentConfig& c) {
  json j{{"subcommand", c.subcommand},
         {"trials", c.trials},
         {"seed", c.seed}};
  const std::string& s = c.subcommand;
  if (s == "synth-adaptive") {
    j["n"] = c.n;
    j["prob_bits"] = c.prob_bits;
    j["phase_bits"] = c.phase_bits;
    j["exact"] = c.exact;
  } else if (s == "synth-one") {
    j["n"] = c.n;
    j["n_expanded"] = c.n_expanded;
    j["m"] = c.m;
  } else if (s == "synth-two") {
    j["n"] = c.n;
    j["n_expanded"] = c.n_expanded;
    j["phase_bits"] = c.phase_bits;
  } else if (s == "distill") {
    j["m"] = c.m;
    j["n"] = c.n;
    j["rounds"] = c.rounds;
    j["a"] = c.a;
    j["mode"] = c.mode;
  } else if (s == "qma" || s == "qma-exp") {
    j["hamiltonian"] = c.hamiltonian_path;
  } else if (s == "extract") {
    j["dimacs"] = c.dimacs_path;
    j["n"] = c.n;
    j["clauses"] = c.clauses;
    j["t"] = c.t;
  } else if (s == "ensembles-check") {
    j["n"] = c.n;
    j["gamma"] = c.gamma;
  } else if (s == "wasserstein-check") {
    j["d"] = c.d;
  }
  return j;
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  static const char* known[] = {"synth-adaptive", "synth-one", "synth-two",
                                "distill",        "qma",       "qma-exp",
                                "extract",        "ensembles-check",
                                "wasserstein-check"};
  bool found = false;
  for (const char* k : known) {
    if (c.subcommand == k) {
      found = true;
      break;
    }
  }
  if (!found) throw UsageError("unknown subcommand: " + c.subcommand);
  if (c.trials < 1) throw UsageError("--trials must be >= 1");

  const std::string& s = c.subcommand;
  if ((s == "synth-adaptive" || s == "synth-one" || s == "synth-two" ||
       s == "ensembles-check") &&
      c.n < 1) {
    throw UsageError(s + " needs --n >= 1");
  }
  if (s == "distill") {
    if (c.m < 1) throw UsageError("distill needs --m >= 1");
    if (c.n < 1) throw UsageError("distill needs --n >= 1");
    if (!(c.a > 0.0 && c.a <= 1.0)) {
      throw UsageError("distill needs --a in (0, 1]");
    }
    if (c.mode != "sampled" && c.mode != "exact") {
      throw UsageError("distill --mode must be 'sampled' or 'exact'");
    }
  }
  if ((s == "qma" || s == "qma-exp") && c.hamiltonian_path.empty()) {
    throw UsageError(s + " needs --hamiltonian");
  }
  if (s == "extract" && c.dimacs_path.empty() && c.n < 1) {
    throw UsageError("extract needs --dimacs or --n for planted instances");
  }
  if (s == "ensembles-check" && !(c.gamma > 0.0 && c.gamma <= 0.25)) {
    throw UsageError("ensembles-check needs --gamma in (0, 0.25]");
  }
  if (s == "wasserstein-check" && c.d < 2) {
    throw UsageError("wasserstein-check needs --d >= 2");
  }
}

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_json(c).dump())));
  return buf;
}

std::string csv_text(const RunRecord& record) {
  std::string out;
  for (std::size_t i = 0; i < record.csv_header.size(); ++i) {
    if (i) out += ',';
    out += record.csv_header[i];
  }
  out += '\n';
  for (const auto& row : record.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

RunRecord run(const ExperimentConfig& config) {
  validate_config(config);
  const int workers = resolve_workers();
  const auto start = std::chrono::steady_clock::now();

  RunnerOutput out;
  const std::string& s = config.subcommand;
  if (s == "synth-adaptive") {
    out = run_synth_adaptive(config, workers);
  } else if (s == "synth-one") {
    out = run_synth_one(config, workers);
  } else if (s == "synth-two") {
    out = run_synth_two(config, workers);
  } else if (s == "distill") {
    out = run_distill(config, workers);
  } else if (s == "qma") {
    out = run_qma(config, workers);
  } else if (s == "qma-exp") {
    out = run_qma_exp(config, workers);
  } else if (s == "extract") {
    out = run_extract(config, workers);
  } else if (s == "ensembles-check") {
    out = run_ensembles_check(config, workers);
  } else {
    out = run_wasserstein_check(config, workers);
  }

  const auto end = std::chrono::steady_clock::now();
  const double wall_ms =
      std::chrono::duration<double, std::milli>(end - start).count();

  RunRecord record;
  record.csv_header = std::move(out.header);
  record.csv_rows.reserve(out.rows.size());
  for (const auto& row : out.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_cell(v));
    record.csv_rows.push_back(std::move(cells));
  }
  record.summary = json{{"subcommand", config.subcommand},
                        {"version", kLibraryVersion},
                        {"seed", config.seed},
                        {"trials", config.trials},
                        {"config", config_json(config)},
                        {"config_hash", config_hash(config)},
                        {"workers", workers},
                        {"wall_ms", wall_ms},
                        {"stats", std::move(out.stats)}};

  if (!config.output_path.empty()) {
    std::ofstream csv(config.output_path + ".csv");
    if (!csv) throw UsageError("cannot write " + config.output_path + ".csv");
    csv << csv_text(record);
    std::ofstream js(config.output_path + ".json");
    if (!js) throw UsageError("cannot write " + config.output_path + ".json");
    js << record.summary.dump(2) << '\n';
  }
  return record;
}

}  // namespace qsynth
