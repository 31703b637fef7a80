#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "ncerg/harness.hpp"
#include "ncerg/verify.hpp"

using namespace ncerg;

int main(int argc, char** argv) {
  CLI::App app{"ncerg: spherical averages, Orlicz norms and Markov operators on tracial matrix algebras"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario and write CSV reports");
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool no_oracle = false;
  run->add_option("--config", config_path, "config file or builtin:<name>")->required();
  run->add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "seed override");
  run->add_flag("--no-oracle", no_oracle, "skip brute-force sphere enumeration");

  auto* verify = app.add_subcommand("verify", "check the acceptance criteria");
  std::string suite = "all";
  std::string data_dir = kDefaultDataDir;
  verify->add_option("--suite", suite, "all | identities | orlicz | convergence")
      ->check(CLI::IsMember({"all", "identities", "orlicz", "convergence"}));
  verify->add_option("--data", data_dir, "directory with the committed oracle CSVs");

  auto* scenario = app.add_subcommand("scenario", "inspect builtin scenarios");
  auto* list = scenario->add_subcommand("list", "list builtin scenarios");
  scenario->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      RunOptions opt;
      if (!out_dir.empty()) opt.out = out_dir;
      if (*seed_opt) opt.seed = seed;
      opt.no_oracle = no_oracle;
      const auto report = run_experiment(ScenarioConfig::load(config_path), opt);
      std::cout << report.text();
      return report.passed() ? kExitPass : kExitCheckFailure;
    }
    if (*verify) {
      const auto results = run_suite(suite, data_dir);
      for (const auto& r : results) std::cout << r.line() << '\n';
      return all_passed(results) ? kExitPass : kExitCheckFailure;
    }
    if (*list) {
      for (const auto& name : builtin_scenarios()) {
        const auto c = ScenarioConfig::parse(builtin_config_text(name));
        std::cout << name << "  kind=" << kind_name(c.kind) << " m=" << c.m << " n_max=" << c.n_max << '\n';
      }
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ResourceError& e) {
    std::cerr << "guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  return kExitPass;
}
