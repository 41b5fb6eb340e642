#pragma once

#include "pvlab/diagnostics.hpp"
#include "pvlab/initial_state.hpp"
#include "pvlab/operators.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pvlab::cli {

enum class SolveMethod { Full, ReducedBiot, DampedWave, QForm };

std::string to_string(SolveMethod m);

struct OutputSpec {
    std::string directory = "pvlab_out";
    bool full_fields = false;
    bool ledger = true;
    std::vector<Identity> identities;
    bool spectrum = false;
    double identity_tolerance = 1e-6; ///< relative, checked under --strict
};

/// Parsed scenario. Field entries stay as JSON until a mesh exists.
struct ScenarioConfig {
    nlohmann::json echo; ///< normalized input (file references made absolute)
    PhysParams params;
    int dim = 1;
    int n = 64;
    double dt = 1e-2;
    double T = 1.0;
    double theta = 0.5;
    nlohmann::json initial = nlohmann::json::object();
    nlohmann::json sources = nlohmann::json::object();
    SolveMethod method = SolveMethod::Full;
    SolverConfig solver;
    double cg_tol = 1e-12;
    bool damp_first_step = true;
    OutputSpec outputs;
    std::uint64_t seed = 0;
};

/// Validates keys and values; ConfigError or InvalidParams on failure.
/// Relative file references resolve against base_dir.
ScenarioConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");

/// Reads a scenario file, or the config echoed inside a manifest.json.
ScenarioConfig load_config(const std::string& path);

InitialSpec build_initial(const ScenarioConfig& cfg, const Mesh& mesh);
SourceSpec build_sources(const ScenarioConfig& cfg);

} // namespace pvlab::cli
