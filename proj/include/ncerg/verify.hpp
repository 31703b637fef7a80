#pragma once

// The acceptance criteria as runnable checks, shared by the CLI and ctest.

#include <filesystem>
#include <string>
#include <vector>

#include "ncerg/harness.hpp"

#ifndef NCERG_DATA_DIR
#define NCERG_DATA_DIR "tests/data"
#endif

namespace ncerg {

inline constexpr const char* kDefaultDataDir = NCERG_DATA_DIR;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;

  std::string line() const;
};

CriterionResult criterion_oracle_equivalence();
CriterionResult criterion_contraction();
CriterionResult criterion_identities();
CriterionResult criterion_orlicz();
CriterionResult criterion_rota();
CriterionResult criterion_convergence(const std::filesystem::path& data_dir);
CriterionResult criterion_certification();
CriterionResult criterion_determinism();

/// "all", "identities" (1,2,3,5,7), "orlicz" (4) or "convergence" (6,8).
std::vector<CriterionResult> run_suite(const std::string& suite, const std::filesystem::path& data_dir);
bool all_passed(const std::vector<CriterionResult>& results);

/// Rows of a committed convergence CSV; the header row is returned separately.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

}  // namespace ncerg
