#pragma once

#include "pvlab/cli/config.hpp"
#include "pvlab/errors.hpp"

#include <optional>
#include <string>

namespace pvlab::cli {

/// Process exit statuses.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitVerification = 4 };

int exit_code_for(ErrorCode code);

struct RunFlags {
    bool strict = false;
    bool dense_mode = false;          ///< force dense operator paths
    std::optional<std::string> out;   ///< overrides outputs.directory
};

struct ScenarioOutcome {
    int exit_code = kExitOk;
    std::string message;
    std::string directory;
};

/// Solves the scenario and writes trajectory.csv, ledger.csv,
/// identities.csv, spectrum.json (if requested) and manifest.json.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunFlags& flags);

/// load_config + run_scenario with every failure mapped to an exit status.
ScenarioOutcome run_scenario_file(const std::string& config_path, const RunFlags& flags);

/// SHA-1 of "blob <size>\0<content>", as git hashes file contents.
std::string git_blob_sha1(const std::string& content);

} // namespace pvlab::cli
