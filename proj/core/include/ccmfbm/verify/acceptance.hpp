#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace ccmfbm::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured values against their thresholds, one line.
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criterion ids to run; empty means all.
  std::set<int> only;
  std::uint64_t seed = 20240611;
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

/// Number of acceptance criteria.
inline constexpr int kCriterionCount = 11;

/// Runs the acceptance criteria at their pinned sizes and tolerances.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  inverse equation residual  max |lhs - 1| = 2.1e-09 (<= 1e-4)  [0.4 s]"
std::string format_result(const CriterionResult& result);

}  // namespace ccmfbm::verify
