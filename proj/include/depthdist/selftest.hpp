#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace depthdist {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks over the whole library (seconds, not minutes).
std::vector<CheckResult> run_selftest(std::uint64_t seed = 0);

}  // namespace depthdist
