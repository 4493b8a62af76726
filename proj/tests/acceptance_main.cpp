#include <cstdlib>
#include <iostream>
#include <string>

#include "ccmfbm/verify/acceptance.hpp"

// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Optional arguments restrict the run to the listed criterion ids.
int main(int argc, char** argv) {
  ccmfbm::verify::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) options.only.insert(std::stoi(argv[i]));
  options.on_result = [](const ccmfbm::verify::CriterionResult& r) {
    std::cout << ccmfbm::verify::format_result(r) << std::endl;
  };
  const auto results = ccmfbm::verify::run_acceptance(options);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
