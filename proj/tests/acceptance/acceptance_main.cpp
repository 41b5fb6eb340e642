#include "pvlab/cli/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

/// Runs every acceptance criterion and prints one pass/fail line each.
/// Optional arguments select criterion ids; exit status is nonzero on any failure.
int main(int argc, char** argv)
{
    using namespace pvlab::cli;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i)
        ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        ids = criteria_for(SuiteLevel::Full);
    bool ok = true;
    for (int id : ids) {
        const CriterionResult r = run_criterion(id);
        std::cout << r.summary_line() << std::endl;
        ok = ok && r.passed();
    }
    std::cout << (ok ? "ALL ACCEPTANCE CRITERIA PASSED" : "ACCEPTANCE FAILURES PRESENT") << std::endl;
    return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
