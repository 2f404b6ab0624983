#pragma once

// Executable acceptance suite, shared by the CLI verify command and the
// acceptance test binary. Each criterion runs independently and reports one
// pass/fail line with expected-vs-observed detail.

#include <string>
#include <vector>

namespace lyadim {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    bool fast = false; // skip the long Lorenz attractor sweep
    int jobs = 1;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

// One "PASS/FAIL/SKIP <index> <name>" line per criterion plus a summary line.
std::string acceptance_report(const std::vector<CriterionResult>& results);

// Skipped criteria do not count as failures.
bool all_passed(const std::vector<CriterionResult>& results);

} // namespace lyadim
