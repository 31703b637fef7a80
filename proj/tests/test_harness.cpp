#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ncerg/harness.hpp"

using namespace ncerg;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const CheckResult* find_check(const RunReport& rep, const std::string& name) {
  for (const auto& c : rep.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("builtin scenarios parse") {
  const auto names = builtin_scenarios();
  CHECK(names.size() == 4);
  for (const auto& n : names) {
    const auto c = ScenarioConfig::load("builtin:" + n);
    CHECK(c.name == n);
    CHECK_NOTHROW(build_scenario(c));
  }
  CHECK_THROWS_AS(ScenarioConfig::load("builtin:nope"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config errors name the offending key") {
  const auto msg = [](const std::string& text) {
    try {
      ScenarioConfig::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg(R"({"kind": "permutation", "m": 1, "colour": 3})").find("colour") != std::string::npos);
  CHECK(msg(R"({"kind": "knot"})").find("knot") != std::string::npos);
  CHECK(msg(R"({"m": 2})").find("kind") != std::string::npos);
  CHECK(msg("{not json").find("JSON") != std::string::npos);
  CHECK(msg(R"({"kind": "permutation", "m": 2, "algebra": {"dims": [1, 1]}, "permutations": [[1, 0]]})")
            .find("permutations") != std::string::npos);
  CHECK(msg(R"({"kind": "free_rotation", "m": 2, "algebra": {"dims": [2]}})").find("algebra") != std::string::npos);
  CHECK(msg(R"({"kind": "random_markov", "seed": 1, "n_max": 0, "algebra": {"dims": [2]}})").find("n_max") !=
        std::string::npos);
  CHECK(msg(R"({"kind": "random_markov", "seed": 1, "orlicz": ["cosh"], "algebra": {"dims": [2]}})")
            .find("orlicz[0]") != std::string::npos);
}

TEST_CASE("random_markov needs a seed") {
  const auto c = ScenarioConfig::parse(R"({"kind": "random_markov", "algebra": {"dims": [2]}})");
  CHECK_THROWS_AS(build_scenario(c), ConfigError);
}

TEST_CASE("custom unitaries are validated") {
  const auto good = ScenarioConfig::parse(R"({
    "name": "phases", "kind": "custom_unitaries", "m": 1,
    "algebra": {"dims": [2]},
    "unitaries": [[[[1, 0], [0, [0, 1]]]]]
  })");
  const auto sc = build_scenario(good);
  CHECK(sc.alg.block_dim(0) == 2);
  const auto bad = ScenarioConfig::parse(R"({
    "kind": "custom_unitaries", "m": 1,
    "algebra": {"dims": [2]},
    "unitaries": [[[[1, 1], [0, 1]]]]
  })");
  CHECK_THROWS_AS(build_scenario(bad), ConfigError);
}

TEST_CASE("free rotation generators") {
  const auto sc = build_scenario(ScenarioConfig::load("builtin:free_rotation"));
  CHECK(sc.alg.block_dim(0) == 3);
  CHECK(sc.action.map(1).is_automorphism());
  CHECK(sc.action.map(2).is_automorphism());
  // e_33 is fixed by the rotation about z and moved by the one about x
  Matrix ez = Matrix::Zero(3, 3);
  ez(2, 2) = 1.0;
  const AlgElement z({ez});
  const bool z_fixed_by_1 = max_abs(sc.action.map(1)(z) - z) < 1e-12;
  const bool z_fixed_by_2 = max_abs(sc.action.map(2)(z) - z) < 1e-12;
  CHECK(z_fixed_by_1 != z_fixed_by_2);
}

TEST_CASE("runs are deterministic and write CSV files") {
  const auto dir = std::filesystem::temp_directory_path() / "ncerg_harness_test";
  std::filesystem::remove_all(dir);
  auto config = ScenarioConfig::load("builtin:permutation2");
  RunOptions a;
  a.out = dir / "a";
  RunOptions b;
  b.out = dir / "b";
  const auto ra = run_experiment(config, a);
  const auto rb = run_experiment(config, b);
  CHECK(ra.passed());
  REQUIRE(ra.csv_paths.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::filesystem::exists(ra.csv_paths[i]));
    CHECK(slurp(ra.csv_paths[i]) == slurp(rb.csv_paths[i]));
  }
  CHECK(std::filesystem::exists(dir / "a" / "summary.txt"));
  CHECK(ra.text().find("permutation2") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("one generator skips the relations") {
  const auto config = ScenarioConfig::parse(R"({
    "name": "cycle", "kind": "permutation", "m": 1, "n_max": 3,
    "algebra": {"dims": [1, 1, 1, 1, 1]},
    "permutations": [[1, 2, 3, 4, 0]]
  })");
  RunOptions opt;
  opt.write = false;
  const auto rep = run_experiment(config, opt);
  const auto* rel = find_check(rep, "relation");
  REQUIRE(rel != nullptr);
  CHECK_FALSE(rel->hard);
  CHECK(rel->note.find("skipped") != std::string::npos);
}

TEST_CASE("oracle guard") {
  auto config = ScenarioConfig::load("builtin:permutation8");
  config.oracle_n_max = 14;
  RunOptions opt;
  opt.write = false;
  CHECK_THROWS_AS(run_experiment(config, opt), ResourceError);
}
