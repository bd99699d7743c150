#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mudflow::acceptance {

struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Run the full verification suite, one pass/fail line per criterion on
/// `log`. Returns the individual results; all_passed() folds them.
std::vector<CriterionResult> run_all(std::ostream& log);
bool all_passed(const std::vector<CriterionResult>& results);

} // namespace mudflow::acceptance
