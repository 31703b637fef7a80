#include <iostream>

#include "ncerg/verify.hpp"

int main() {
  const auto results = ncerg::run_suite("all", ncerg::kDefaultDataDir);
  for (const auto& r : results) std::cout << r.line() << '\n';
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria pass\n";
  return failed ? 1 : 0;
}
