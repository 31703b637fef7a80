#pragma once

// Scenario configuration, construction and the experiment pipeline.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ncerg/cesaro.hpp"
#include "ncerg/spherical.hpp"

namespace ncerg {

enum class ScenarioKind { permutation, free_rotation, custom_unitaries, random_markov };

struct Tolerances {
  double identity = 1e-9;     // Relation, S_1 identities
  double diagonal = 1e-10;    // diagonal identity and oracle equivalence
  double contraction = 1e-10;
  double target = 1e-6;       // err_l2 that counts as converged
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::permutation;
  int m = 2;
  std::vector<Block> blocks;
  bool normalized = true;
  std::vector<std::string> orlicz{"power:2", "llogl"};
  int n_max = 20;       // even radii 2..2N
  int oracle_n_max = 6; // brute-force radius
  std::optional<std::uint64_t> seed;
  Tolerances tolerances;
  std::string output_dir = "out";
  std::vector<std::vector<int>> permutations;        // permutation payload
  std::vector<std::vector<Matrix>> unitaries;        // custom payload, per generator per block

  /// Parses JSON text; unknown keys and bad values throw ConfigError.
  static ScenarioConfig parse(const std::string& text);
  static ScenarioConfig load(const std::string& path_or_builtin);
};

const char* kind_name(ScenarioKind kind);
std::vector<std::string> builtin_scenarios();
std::string builtin_config_text(const std::string& name);

struct Scenario {
  TraceAlgebra alg;
  Action action;
  SphereChain chain;
  std::vector<AlgElement> samples;  // samples[0] drives the convergence runs
};

/// Deterministic given (config, seed). Invalid payloads throw ConfigError.
Scenario build_scenario(const ScenarioConfig& config);

struct CheckResult {
  std::string phase;
  std::string name;
  bool passed = false;
  bool hard = true;  // soft checks are reported but never fail a run
  double residual = 0.0;
  std::string note;
};

struct RunReport {
  std::string scenario_echo;
  std::string version;
  std::vector<CheckResult> checks;
  std::vector<std::filesystem::path> csv_paths;
  std::vector<std::pair<std::string, double>> phase_seconds;
  ConvergenceReport convergence;

  bool passed() const;
  std::string text() const;
};

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  bool no_oracle = false;
  bool write = true;
};

/// Certification, identities, convergence; writes CSVs and summary.txt.
RunReport run_experiment(const ScenarioConfig& config, const RunOptions& options = {});

/// The convergence CSV body that run_experiment writes for a config.
ConvergenceReport convergence_run(const ScenarioConfig& config, const Scenario& scenario);

enum ExitCode { kExitPass = 0, kExitCheckFailure = 1, kExitConfig = 2, kExitGuard = 3 };

}  // namespace ncerg
