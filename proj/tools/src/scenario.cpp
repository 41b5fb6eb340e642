#include "pvlab/cli/scenario.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace pvlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double mnorm(const SpMat& M, const Vec& v)
{
    return std::sqrt(std::max(0.0, v.dot(M * v)));
}

/// Appends a value, or an empty cell when the field is absent.
void cell(std::ostringstream& os, bool present, double v)
{
    os << ',';
    if (present)
        os << num17(v);
}

struct CsvFile {
    std::vector<std::string> columns;
    std::string body;
};

CsvFile trajectory_csv(const OperatorBundle& b, const Trajectory& tr, bool full_fields)
{
    CsvFile f;
    f.columns = {"t", "p_l2", "p_vnorm", "u_l2", "u_enorm", "u_dot_enorm", "p_dot_l2", "zeta_l2"};
    if (full_fields) {
        for (int i = 0; i < b.np(); ++i)
            f.columns.push_back("p_" + std::to_string(i));
        for (int i = 0; i < b.nu(); ++i)
            f.columns.push_back("u_" + std::to_string(i));
    }
    std::ostringstream os;
    for (const State& s : tr.states) {
        os << num17(s.t);
        cell(os, true, mnorm(b.Mp, s.p));
        cell(os, true, mnorm(b.Ap, s.p));
        cell(os, s.has_u(), s.has_u() ? mnorm(b.Mu, s.u) : 0.0);
        cell(os, s.has_u(), s.has_u() ? mnorm(b.Ke, s.u) : 0.0);
        cell(os, s.has_u_dot(), s.has_u_dot() ? mnorm(b.Ke, s.u_dot) : 0.0);
        cell(os, s.has_p_dot(), s.has_p_dot() ? mnorm(b.Mp, s.p_dot) : 0.0);
        cell(os, s.has_zeta(), s.has_zeta() ? mnorm(b.Mp, s.zeta) : 0.0);
        if (full_fields) {
            for (int i = 0; i < b.np(); ++i)
                cell(os, true, s.p[i]);
            for (int i = 0; i < b.nu(); ++i)
                cell(os, s.has_u(), s.has_u() ? s.u[i] : 0.0);
        }
        os << '\n';
    }
    f.body = os.str();
    return f;
}

CsvFile ledger_csv(const EnergyLedger& led)
{
    CsvFile f;
    f.columns = {"t",           "elastic",       "storage",          "viscous",         "darcy",
                 "consolidation", "source_work", "content_exchange", "balance_residual"};
    std::ostringstream os;
    for (const auto& r : led.rows) {
        os << num17(r.t);
        for (double v : {r.elastic, r.storage, r.viscous, r.darcy, r.consolidation, r.source_work,
                         r.content_exchange, r.balance_residual})
            os << ',' << num17(v);
        os << '\n';
    }
    f.body = os.str();
    return f;
}

std::string render(const CsvFile& f)
{
    std::string s;
    for (std::size_t i = 0; i < f.columns.size(); ++i)
        s += (i ? "," : "") + f.columns[i];
    return s + "\n" + f.body;
}

void write_file(const fs::path& p, const std::string& content)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::ConfigError, "cannot write '" + p.string() + "'");
    out << content;
    if (!out)
        throw Error(ErrorCode::ConfigError, "failed writing '" + p.string() + "'");
}

json spectrum_json(const Operators& ops)
{
    const PhysParams& pp = ops.params();
    json j;
    if (ops.dense_available()) {
        const PropertyReport rep = ops.check_operator_properties();
        j["operator_properties"] = {{"b_symmetry_defect", rep.b_symmetry_defect},
                                    {"b_min_ritz", rep.b_min_ritz},
                                    {"b_max_ritz", rep.b_max_ritz},
                                    {"calb_min_ritz", rep.calb_min_ritz},
                                    {"calb_condition", std::isfinite(rep.calb_condition) ? json(rep.calb_condition)
                                                                                        : json("inf")},
                                    {"b_min_singular", rep.b_min_singular},
                                    {"b_numerical_kernel", rep.b_numerical_kernel},
                                    {"coercivity_constant", rep.coercivity_constant}};
    }
    if (pp.c0 > 0.0 && pp.delta1 > 0.0 && pp.delta2 == 0.0) {
        const SpectrumReport rep = spectrum_report(build_first_order_generator(ops));
        json ev = json::array();
        for (const auto& z : rep.eigenvalues)
            ev.push_back({z.real(), z.imag()});
        j["generator"] = {{"spectral_abscissa", rep.spectral_abscissa},
                          {"sector_ratio", rep.sector_ratio},
                          {"min_real_gap", rep.min_real_gap},
                          {"eigenvalues", ev}};
    } else if (pp.c0 == 0.0 && pp.delta1 > 0.0 && pp.delta2 == 0.0) {
        const Vec r = r_spectrum(ops);
        j["r_spectrum"] = std::vector<double>(r.data(), r.data() + r.size());
    }
    return j;
}

Trajectory solve(const ScenarioConfig& cfg, std::shared_ptr<const Operators> ops, const InitialSpec& init,
                 const SourceSpec& src)
{
    switch (cfg.method) {
    case SolveMethod::Full: {
        RunOptions opts;
        opts.damp_first_step = cfg.damp_first_step;
        return run(ops, init, src, cfg.dt, cfg.T, cfg.theta, opts);
    }
    case SolveMethod::ReducedBiot: {
        ReducedInitial ri;
        if (init.p0)
            ri.p0 = init.p0->coeffs;
        else if (init.d0)
            ri.d0 = init.d0->coeffs;
        ReducedOptions opts;
        opts.cg_tol = cfg.cg_tol;
        opts.damp_first_step = cfg.damp_first_step;
        return solve_reduced_biot(ops, ri, src, cfg.dt, cfg.T, cfg.theta, opts);
    }
    case SolveMethod::DampedWave: {
        const InitialState st = resolve_initial_state(*ops, init, src);
        if (!st.has_p_dot())
            throw Error(ErrorCode::RegimeMismatch, "damped_wave needs c0 > 0, delta1 > 0, delta2 = 0");
        return solve_strongly_damped_wave(ops, st.p, st.p_dot, src, cfg.dt, cfg.T, cfg.theta, cfg.cg_tol);
    }
    case SolveMethod::QForm: {
        if (!init.p0)
            throw Error(ErrorCode::Underspecified, "q_form needs p0");
        return solve_ode_q_form(ops, init.p0->coeffs, src, cfg.dt, cfg.T, cfg.theta, QFormMethod::Theta,
                                cfg.cg_tol);
    }
    }
    throw Error(ErrorCode::ConfigError, "unknown solve method");
}

std::string hex_digest(const unsigned char* d, unsigned len)
{
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[d[i] >> 4];
        s += hex[d[i] & 15];
    }
    return s;
}

} // namespace

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SolveFailure:
    case ErrorCode::SingularSystem:
    case ErrorCode::EigenFailure:
    case ErrorCode::NonPositiveSeries:
        return kExitSolver;
    default:
        return kExitConfig;
    }
}

std::string git_blob_sha1(const std::string& content)
{
    const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, md, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok)
        throw Error(ErrorCode::SolveFailure, "SHA-1 digest failed");
    return hex_digest(md, len);
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunFlags& flags)
{
    ScenarioOutcome outcome;
    const fs::path dir = flags.out ? fs::path(*flags.out) : fs::path(cfg.outputs.directory);
    outcome.directory = dir.string();

    SolverConfig scfg = cfg.solver;
    if (flags.dense_mode)
        scfg.dense_threshold = std::numeric_limits<int>::max();
    const auto bundle = assemble_forms(build_mesh(cfg.dim, cfg.n), cfg.params);
    const auto ops = std::make_shared<const Operators>(bundle, scfg);
    const InitialSpec init = build_initial(cfg, *bundle->mesh);
    const SourceSpec src = build_sources(cfg);
    const Trajectory tr = solve(cfg, ops, init, src);

    std::map<std::string, std::string> files;
    json columns;
    const CsvFile traj = trajectory_csv(*bundle, tr, cfg.outputs.full_fields);
    files["trajectory.csv"] = render(traj);
    columns["trajectory.csv"] = traj.columns;
    if (cfg.outputs.ledger) {
        const CsvFile led = ledger_csv(energy_ledger(*ops, tr, src));
        files["ledger.csv"] = render(led);
        columns["ledger.csv"] = led.columns;
    }

    std::ostringstream ids;
    ids << "identity,t,residual,relative\n";
    json id_summary = json::object();
    std::string failed;
    if (!cfg.outputs.identities.empty()) {
        IdentityOptions iopt;
        for (Identity id : cfg.outputs.identities)
            if (id == Identity::ThirdOne)
                iopt.poincare_korn = poincare_korn_constant(*ops);
        for (Identity id : cfg.outputs.identities) {
            const IdentitySeries s = identity_residual(*ops, tr, src, id, iopt);
            const double scale = s.scale > 0.0 ? s.scale : 1.0;
            for (std::size_t i = 0; i < s.t.size(); ++i)
                ids << to_string(id) << ',' << num17(s.t[i]) << ',' << num17(s.residual[i]) << ','
                    << num17(s.residual[i] / scale) << '\n';
            const double measured = s.inequality ? s.max_value() / scale : s.max_abs() / scale;
            const double tol = s.inequality ? 1e-10 : cfg.outputs.identity_tolerance;
            const bool ok = measured <= tol;
            id_summary[to_string(id)] = {{"measured", measured}, {"tolerance", tol}, {"inequality", s.inequality},
                                         {"passed", ok}};
            if (!ok)
                failed += (failed.empty() ? "" : ", ") + to_string(id);
        }
    }
    files["identities.csv"] = ids.str();
    columns["identities.csv"] = {"identity", "t", "residual", "relative"};
    if (cfg.outputs.spectrum)
        files["spectrum.json"] = spectrum_json(*ops).dump(2) + "\n";

    fs::create_directories(dir);
    json manifest;
    manifest["manifest_version"] = 1;
    manifest["tool"] = "pvlab 0.1.0";
    manifest["config"] = cfg.echo;
    manifest["regime"] = to_string(tr.regime);
    manifest["method"] = to_string(cfg.method);
    manifest["mesh"] = bundle->mesh->id();
    manifest["scheme"] = {{"method", tr.scheme.method},
                          {"theta", tr.scheme.theta},
                          {"dt", tr.scheme.dt},
                          {"rate_rule", to_string(tr.scheme.rate_rule)},
                          {"first_step_backward_euler", tr.scheme.first_step_backward_euler},
                          {"first_step_reason", tr.scheme.first_step_reason}};
    manifest["source_descriptor"] = tr.source_descriptor;
    manifest["flags"] = {{"strict", flags.strict}, {"dense_mode", flags.dense_mode}};
    manifest["columns"] = columns;
    manifest["identities"] = id_summary;
    std::string tree;
    for (const auto& [name, content] : files) {
        write_file(dir / name, content);
        const std::string h = git_blob_sha1(content);
        manifest["files"][name] = {{"git_blob_sha1", h}, {"bytes", content.size()}};
        tree += name + " " + h + "\n";
    }
    manifest["content_hash"] = git_blob_sha1(tree);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    if (!failed.empty() && flags.strict) {
        outcome.exit_code = kExitVerification;
        outcome.message = "identity tolerance exceeded: " + failed;
    } else {
        outcome.message = "wrote " + dir.string() + " (" + to_string(tr.regime) + ", " +
                          std::to_string(tr.states.size() - 1) + " steps)";
    }
    return outcome;
}

ScenarioOutcome run_scenario_file(const std::string& config_path, const RunFlags& flags)
{
    try {
        return run_scenario(load_config(config_path), flags);
    } catch (const Error& e) {
        return {exit_code_for(e.code()), e.what(), ""};
    } catch (const nlohmann::json::exception& e) {
        return {kExitConfig, std::string("ConfigError: ") + e.what(), ""};
    } catch (const fs::filesystem_error& e) {
        return {kExitConfig, std::string("ConfigError: ") + e.what(), ""};
    } catch (const std::exception& e) {
        return {kExitSolver, std::string("SolveFailure: ") + e.what(), ""};
    }
}

} // namespace pvlab::cli
