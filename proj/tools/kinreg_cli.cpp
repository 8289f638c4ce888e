#include "kinreg/parallel.hpp"
#include "kinreg/suites.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <set>

using namespace kinreg;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kBadInput = 2, kDiverged = 3;

struct Flags {
    std::string config;
    std::string out_dir;
    long seed = -1;
    int jobs = 0;
};

RunConfig resolve_config(const Flags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
    apply_env_overrides(cfg, process_environment());
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.seed >= 0) cfg.seed = static_cast<unsigned>(f.seed);
    if (f.jobs > 0) cfg.jobs = f.jobs;
    validate_config(cfg);
    return cfg;
}

void write_artifacts(const RunConfig& cfg, RunSummary& summary, const std::vector<Table>& tables) {
    const std::filesystem::path dir(cfg.out_dir);
    std::set<std::string> seen;
    for (const auto& t : tables) {
        if (!seen.insert(t.name).second) throw Error("artifact written twice: " + t.name);
        write_text(dir / (t.name + ".csv"), to_csv(t));
        summary.artifacts.push_back(t.name + ".csv");
    }
    write_text(dir / "verdicts.csv", to_csv(verdict_table(summary.verdicts)));
    summary.artifacts.push_back("verdicts.csv");
    summary.artifacts.push_back("summary.json");
    write_text(dir / "summary.json", to_json(summary).dump(2) + "\n");
}

void print_verdicts(const RunSummary& s) {
    for (const auto& v : s.verdicts)
        std::cout << (v.advisory ? "[advisory] " : "") << v.check << ": " << v.status << " (" << v.measured
                  << " vs " << v.limit << ")\n";
}

int run(const std::string& command, const Flags& flags) {
    RunConfig cfg;
    try {
        cfg = resolve_config(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << (flags.config.empty() ? "" : flags.config + ": ") << e.what() << "\n";
        return kBadInput;
    }
    set_default_jobs(cfg.jobs);

    RunSummary summary;
    summary.command = command;
    summary.config_text = serialize_config(cfg);
    summary.seed = cfg.seed;
    SuiteResult all;
    auto want = [&](const char* name) { return command == name || command == "all"; };

    try {
        if (want("verify-collision")) all.append(verify_collision(cfg));
        if (want("verify-geometry")) all.append(verify_geometry(cfg));
        if (want("verify-flux-forms")) all.append(verify_flux_forms(cfg));
        if (want("solve") || want("probe-regularity")) {
            std::vector<Phase> t;
            const auto start = std::chrono::steady_clock::now();
            const TransportSolution sol = solve_config(cfg);
            all.timings.push_back({"picard_solve", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
            all.append(solve_report(cfg, sol));
            if (want("probe-regularity")) all.append(probe_regularity(cfg, sol));
        }
    } catch (const ConvergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        summary.timings = all.timings;
        summary.convergence["diverged"] = true;
        summary.convergence["message"] = e.what();
        summary.convergence["iterations"] = e.history().size();
        for (auto& v : all.verdicts) summary.add(v);
        summary.add(Verdict{"picard_convergence", "fail", e.history().empty() ? 0.0 : e.history().back(),
                            cfg.solver.tol, false, e.what()});
        std::vector<Table> tables = std::move(all.tables);
        tables.push_back(residual_table(e.history()));
        write_artifacts(cfg, summary, tables);
        return kDiverged;
    }

    summary.timings = all.timings;
    summary.convergence = all.convergence;
    for (auto& v : all.verdicts) summary.add(v);
    write_artifacts(cfg, summary, all.tables);
    print_verdicts(summary);
    std::cout << "artifacts written to " << cfg.out_dir << "\n";
    return summary.failed() ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic boundary-regularity solver and verification suites"};
    app.require_subcommand(1);
    app.footer("Environment: KINREG_<SECTION>_<KEY> overrides a config key, e.g. KINREG_SOLVER_TOL=1e-8.\n"
               "Exit status: 0 all checks pass, 1 a check failed, 2 bad config or usage, 3 divergence.");
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "Picard solve; writes wallflux, field and residuals"},
        {"verify-geometry", "exit-time, chord and boundary-geometry inequalities"},
        {"verify-collision", "collision operator invariants and kernel decay"},
        {"verify-flux-forms", "velocity, surface and volume forms of the flux terms"},
        {"probe-regularity", "solve, then probe derivatives and moduli near the wall"},
        {"all", "every suite above"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "config file (sectioned key = value)")->check(CLI::ExistingFile);
        sub->add_option("--out-dir", flags.out_dir, "artifact directory");
        sub->add_option("--seed", flags.seed, "random seed")->check(CLI::NonNegativeNumber);
        sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kBadInput;
    }
    try {
        return run(app.get_subcommands().front()->get_name(), flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
}
