#include "pvlab/cli/config.hpp"

#include "pvlab/cli/catalog.hpp"
#include "pvlab/errors.hpp"

#include <filesystem>
#include <fstream>
#include <set>

namespace pvlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& msg)
{
    throw Error(ErrorCode::ConfigError, msg);
}

void allow_keys(const json& j, const std::set<std::string>& keys, const std::string& where)
{
    if (!j.is_object())
        config_error("'" + where + "' must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.contains(k))
            config_error("unknown key '" + k + "' in '" + where + "'");
}

template <class T>
T get(const json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        config_error("'" + where + "." + key + "' has the wrong type");
    }
}

double number(const json& j, const char* key, double fallback, const std::string& where)
{
    if (j.contains(key) && !j.at(key).is_number())
        config_error("'" + where + "." + key + "' must be a number");
    return get<double>(j, key, fallback, where);
}

void absolutize_files(json& entry, const std::string& base_dir)
{
    if (entry.is_object() && entry.contains("file")) {
        allow_keys(entry, {"file"}, "file reference");
        const fs::path p = entry.at("file").get<std::string>();
        entry["file"] = (p.is_absolute() ? p : fs::absolute(fs::path(base_dir) / p)).lexically_normal().string();
    }
}

} // namespace

std::string to_string(SolveMethod m)
{
    switch (m) {
    case SolveMethod::Full:
        return "full";
    case SolveMethod::ReducedBiot:
        return "reduced_biot";
    case SolveMethod::DampedWave:
        return "damped_wave";
    case SolveMethod::QForm:
        return "q_form";
    }
    return "unknown";
}

ScenarioConfig parse_config(const json& input, const std::string& base_dir)
{
    ScenarioConfig cfg;
    json j = input;
    allow_keys(j, {"params", "mesh", "time", "initial", "sources", "solver", "outputs", "seed"}, "config");

    const json params = j.value("params", json::object());
    allow_keys(params, {"lambda_e", "mu", "alpha", "c0", "kappa", "delta1", "delta2", "lambda_star"}, "params");
    PhysParams& pp = cfg.params;
    pp.lambda_e = number(params, "lambda_e", pp.lambda_e, "params");
    pp.mu = number(params, "mu", pp.mu, "params");
    pp.alpha = number(params, "alpha", pp.alpha, "params");
    pp.c0 = number(params, "c0", pp.c0, "params");
    pp.kappa = number(params, "kappa", pp.kappa, "params");
    pp.delta1 = number(params, "delta1", pp.delta1, "params");
    pp.delta2 = number(params, "delta2", pp.delta2, "params");
    pp.lambda_star = number(params, "lambda_star", pp.lambda_star, "params");
    require_valid(pp);

    const json mesh = j.value("mesh", json::object());
    allow_keys(mesh, {"dim", "n"}, "mesh");
    cfg.dim = get<int>(mesh, "dim", cfg.dim, "mesh");
    cfg.n = get<int>(mesh, "n", cfg.n, "mesh");
    if (cfg.dim != 1 && cfg.dim != 2)
        config_error("mesh.dim must be 1 or 2");
    if (cfg.n < 2)
        config_error("mesh.n must be at least 2");

    const json time = j.value("time", json::object());
    allow_keys(time, {"dt", "T", "theta"}, "time");
    cfg.dt = number(time, "dt", cfg.dt, "time");
    cfg.T = number(time, "T", cfg.T, "time");
    cfg.theta = number(time, "theta", cfg.theta, "time");
    if (!(cfg.dt > 0.0) || !(cfg.T >= 0.0))
        config_error("time.dt must be positive and time.T nonnegative");
    if (!(cfg.theta >= 0.5 && cfg.theta <= 1.0))
        config_error("time.theta must lie in [0.5, 1]");
    step_count(cfg.dt, cfg.T);

    cfg.initial = j.value("initial", json::object());
    allow_keys(cfg.initial, {"p0", "u0", "d0", "p1"}, "initial");
    for (auto& [k, v] : cfg.initial.items())
        absolutize_files(v, base_dir);
    j["initial"] = cfg.initial;

    cfg.sources = j.value("sources", json::object());
    allow_keys(cfg.sources, {"F", "S"}, "sources");
    for (const auto& [k, v] : cfg.sources.items()) {
        allow_keys(v, {"space", "time"}, "sources." + k);
        if (!v.contains("space"))
            config_error("sources." + k + " needs a 'space' field entry");
    }

    const json solver = j.value("solver", json::object());
    allow_keys(solver, {"method", "inner_tol", "max_iter", "dense_threshold", "cg_tol", "first_step_backward_euler"},
               "solver");
    const std::string method = get<std::string>(solver, "method", "full", "solver");
    if (method == "full")
        cfg.method = SolveMethod::Full;
    else if (method == "reduced_biot")
        cfg.method = SolveMethod::ReducedBiot;
    else if (method == "damped_wave")
        cfg.method = SolveMethod::DampedWave;
    else if (method == "q_form")
        cfg.method = SolveMethod::QForm;
    else
        config_error("solver.method must be full, reduced_biot, damped_wave or q_form");
    cfg.solver.inner_tol = number(solver, "inner_tol", cfg.solver.inner_tol, "solver");
    cfg.solver.max_iter = get<int>(solver, "max_iter", cfg.solver.max_iter, "solver");
    cfg.solver.dense_threshold = get<int>(solver, "dense_threshold", cfg.solver.dense_threshold, "solver");
    cfg.cg_tol = number(solver, "cg_tol", cfg.cg_tol, "solver");
    cfg.damp_first_step = get<bool>(solver, "first_step_backward_euler", cfg.damp_first_step, "solver");

    const json outputs = j.value("outputs", json::object());
    allow_keys(outputs, {"directory", "full_fields", "ledger", "identities", "spectrum", "identity_tolerance"},
               "outputs");
    OutputSpec& o = cfg.outputs;
    o.directory = get<std::string>(outputs, "directory", o.directory, "outputs");
    o.full_fields = get<bool>(outputs, "full_fields", o.full_fields, "outputs");
    o.ledger = get<bool>(outputs, "ledger", o.ledger, "outputs");
    o.spectrum = get<bool>(outputs, "spectrum", o.spectrum, "outputs");
    o.identity_tolerance = number(outputs, "identity_tolerance", o.identity_tolerance, "outputs");
    for (const auto& name : get<std::vector<std::string>>(outputs, "identities", {}, "outputs"))
        o.identities.push_back(identity_from_string(name));

    if (j.contains("seed") && !j.at("seed").is_number_unsigned())
        config_error("seed must be a nonnegative integer");
    cfg.seed = get<std::uint64_t>(j, "seed", 0, "config");
    cfg.echo = j;
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        config_error("cannot read config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error("'" + path + "' is not valid JSON: " + e.what());
    }
    if (j.is_object() && j.contains("manifest_version")) {
        if (!j.contains("config"))
            config_error("manifest '" + path + "' carries no config");
        j = j.at("config");
    }
    const fs::path base = fs::path(path).parent_path();
    return parse_config(j, base.empty() ? "." : base.string());
}

InitialSpec build_initial(const ScenarioConfig& cfg, const Mesh& mesh)
{
    InitialSpec spec;
    auto field = [&](const char* key, bool pressure) -> std::optional<FieldVec> {
        if (!cfg.initial.contains(key))
            return std::nullopt;
        const json& e = cfg.initial.at(key);
        if (e.contains("file")) {
            const Vec c = read_coefficients(e.at("file").get<std::string>());
            return pressure ? FieldVec::pressure(c) : FieldVec::displacement(c);
        }
        if (pressure)
            return project_function(mesh, scalar_field(e, cfg.dim, cfg.seed), Space::PressureZeroMean);
        if (cfg.dim == 1)
            return project_function(mesh, scalar_field(e, 1, cfg.seed), Space::Displacement);
        return project_function(mesh, vector_field(e, cfg.dim, cfg.seed));
    };
    spec.p0 = field("p0", true);
    spec.u0 = field("u0", false);
    spec.d0 = field("d0", true);
    spec.p1 = field("p1", true);
    return spec;
}

SourceSpec build_sources(const ScenarioConfig& cfg)
{
    VectorFn f;
    ScalarFn s;
    ExpPoly g, h;
    std::string desc;
    if (cfg.sources.contains("F")) {
        const json& e = cfg.sources.at("F");
        f = vector_field(e.at("space"), cfg.dim, cfg.seed);
        g = e.contains("time") ? time_profile(e.at("time")) : ExpPoly{};
        desc += "F=" + e.dump();
    }
    if (cfg.sources.contains("S")) {
        const json& e = cfg.sources.at("S");
        s = scalar_field(e.at("space"), cfg.dim, cfg.seed);
        h = e.contains("time") ? time_profile(e.at("time")) : ExpPoly{};
        desc += (desc.empty() ? "" : "; ") + std::string("S=") + e.dump();
    }
    if (!f && !s)
        return SourceSpec::none();
    return SourceSpec::separable(f, g, s, h, desc);
}

} // namespace pvlab::cli
