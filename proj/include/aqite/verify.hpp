#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aqite {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Algebra, model and trajectory invariants on chains of at most
/// `max_length` sites. Every check runs; failures do not stop the suite.
std::vector<CheckResult> run_invariant_suite(int max_length = 6);

/// One `PASS|FAIL name: detail` line per check. Returns true when all pass.
bool print_checks(std::ostream& os, const std::vector<CheckResult>& checks);

}  // namespace aqite
