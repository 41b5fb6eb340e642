#pragma once

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace pvlab::cli {

/// One measured quantity of a criterion against its threshold.
struct Check {
    std::string label;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation; ///< "<=", ">=", "<", "in" (threshold..upper), "report"
    double upper = 0.0;
    bool passed = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<Check> checks;
    double seconds = 0.0;
    double budget_seconds = 0.0;
    std::string error; ///< set when the criterion threw

    bool passed() const;
    /// Single human-readable line: "[PASS] 3 oracle equivalence: ...".
    std::string summary_line() const;
    nlohmann::json to_json() const;
};

struct VerifyOptions {
    /// Relative non-symmetric perturbation of the dense B (fault injection).
    double b_asymmetry = 0.0;
};

enum class SuiteLevel { Quick, Full };

/// Criterion ids in each suite level (quick: 1, 2, 3, 8, 12; full: 1-12).
std::vector<int> criteria_for(SuiteLevel level);

/// Runs one acceptance criterion; exceptions are captured as a failure.
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

struct SuiteReport {
    SuiteLevel level = SuiteLevel::Quick;
    std::vector<CriterionResult> results;

    bool passed() const;
    nlohmann::json to_json() const;
};

/// Runs a suite level; on_result is called after each criterion.
SuiteReport verify_suite(SuiteLevel level, const VerifyOptions& opts = {},
                         const std::function<void(const CriterionResult&)>& on_result = {});

} // namespace pvlab::cli
