#include "pvlab/cli/catalog.hpp"
#include "pvlab/cli/scenario.hpp"
#include "pvlab/cli/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace {

using namespace pvlab::cli;

int run_batch(const std::vector<std::string>& configs, RunFlags flags, int threads)
{
    std::vector<ScenarioOutcome> outcomes(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex io;
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            RunFlags f = flags;
            if (flags.out && configs.size() > 1)
                f.out = (std::filesystem::path(*flags.out) / std::filesystem::path(configs[i]).stem()).string();
            outcomes[i] = run_scenario_file(configs[i], f);
            std::lock_guard lock(io);
            (outcomes[i].exit_code == kExitOk ? std::cout : std::cerr)
                << configs[i] << ": " << outcomes[i].message << '\n';
        }
    };
    const int n = std::clamp(threads, 1, static_cast<int>(configs.size()));
    std::vector<std::jthread> pool;
    for (int t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    int status = kExitOk;
    for (const auto& o : outcomes)
        status = std::max(status, o.exit_code);
    return status;
}

int run_verify(const std::string& level, const std::string& out, double asymmetry, const std::vector<int>& only)
{
    VerifyOptions opts;
    opts.b_asymmetry = asymmetry;
    SuiteReport rep;
    rep.level = level == "full" ? SuiteLevel::Full : SuiteLevel::Quick;
    const std::vector<int> ids = only.empty() ? criteria_for(rep.level) : only;
    for (int id : ids) {
        rep.results.push_back(run_criterion(id, opts));
        std::cout << rep.results.back().summary_line() << std::endl;
    }
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        std::ofstream(std::filesystem::path(out) / "verify_report.json") << rep.to_json().dump(2) << '\n';
    }
    std::cout << (rep.passed() ? "verify: pass" : "verify: FAIL") << std::endl;
    return rep.passed() ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pvlab: poro-visco-elastic finite element solver and verification suite"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run scenario configs and write CSV/JSON artifacts");
    std::vector<std::string> configs;
    RunFlags flags;
    std::string out;
    int threads = 1;
    run->add_option("configs", configs, "Scenario config files (or manifest.json files)")->required()->check(
        CLI::ExistingFile);
    run->add_flag("--strict", flags.strict, "Exit 4 when an identity exceeds its tolerance");
    run->add_flag("--dense-mode", flags.dense_mode, "Force dense operator paths");
    run->add_option("--threads", threads, "Scenarios run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Output directory (overrides outputs.directory)");

    auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
    std::string level = "quick";
    std::string vout;
    double asymmetry = 0.0;
    std::vector<int> only;
    verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--out", vout, "Directory for verify_report.json");
    verify->add_option("--criterion", only, "Run only these criterion ids")->check(CLI::Range(1, 12));
    verify->add_option("--inject-b-asymmetry", asymmetry, "Fault injection: relative asymmetry added to dense B");
    int vthreads = 1;
    verify->add_option("--threads", vthreads, "Accepted for symmetry with run; criteria run sequentially");

    app.add_subcommand("catalog", "List the analytic fields usable in configs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (run->parsed()) {
        if (!out.empty())
            flags.out = out;
        return run_batch(configs, flags, threads);
    }
    if (verify->parsed())
        return run_verify(level, vout, asymmetry, only);
    std::cout << catalog_help();
    return kExitOk;
}
