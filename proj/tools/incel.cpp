// Command-line front end: run a scenario, run robustness sweeps, list scenarios.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "incel/error.hpp"
#include "incel/run.hpp"

namespace {

struct RunFlags {
    std::string config;
    std::string scenario;
    std::string out;
    std::optional<double> gamma, dt;
    std::optional<std::string> formula, elasticity, failure;
    std::optional<int> steps, snapshot_every;
    bool quiet = false;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool with_scenario)
{
    app->add_option("--config", f.config, "YAML run configuration")->check(CLI::ExistingFile);
    if (with_scenario) app->add_option("--scenario", f.scenario, "built-in scenario (ignored with --config)");
    app->add_option("--out", f.out, "output directory");
    app->add_option("--gamma", f.gamma, "grad-div parameter");
    app->add_option("--formula", f.formula, "gonzalez|scaled|coaxial|midpoint");
    app->add_option("--elasticity", f.elasticity, "corrected|conventional");
    app->add_option("--dt", f.dt, "time step");
    app->add_option("--steps", f.steps, "number of steps (default T/dt)");
    app->add_option("--snapshot-every", f.snapshot_every, "VTK snapshot cadence in steps (0 = off)");
    app->add_option("--failure", f.failure, "abort|halve|accept");
    app->add_flag("-q,--quiet", f.quiet, "no progress output");
}

int do_run(const RunFlags& f, const std::string& fixed_scenario)
{
    using namespace incel;
    RunConfig cfg;
    if (!f.config.empty()) {
        cfg = load_config(f.config);
        if (!fixed_scenario.empty() && cfg.spec.name != fixed_scenario && cfg.scenario != fixed_scenario) {
            throw ConfigError("config describes '" + cfg.spec.name + "', not '" + fixed_scenario + "'");
        }
    } else {
        cfg = default_config(!fixed_scenario.empty() ? fixed_scenario
                                                     : (f.scenario.empty() ? "twisting_column" : f.scenario));
    }
    if (!f.out.empty()) cfg.output.dir = f.out;
    if (f.gamma) cfg.spec.gamma = *f.gamma;
    if (f.dt) cfg.spec.dt = *f.dt;
    if (f.formula) cfg.spec.formula = parse_formula(*f.formula);
    if (f.elasticity) cfg.solver.elasticity = parse_elasticity(*f.elasticity);
    if (f.failure) cfg.solver.failure = parse_failure_policy(*f.failure);
    if (f.steps) {
        if (*f.steps < 0) throw ConfigError("--steps must be non-negative");
        cfg.steps = *f.steps;
    }
    if (f.snapshot_every) cfg.output.snapshot_every = *f.snapshot_every;
    const std::string warn = cfg.validate();
    if (!warn.empty()) std::cerr << "warning: " << warn << "\n";

    const RunSummary s = run(cfg, f.quiet ? nullptr : &std::cout);
    if (s.exit_code != kExitOk) {
        std::cerr << "error: " << s.message << " (artifacts kept in " << cfg.output.dir << ")\n";
    } else if (!f.quiet) {
        std::cout << "done: " << s.steps << " steps, output in " << cfg.output.dir << "\n";
    }
    return s.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace incel;
    CLI::App app{"Incompressible elastodynamics with energy-momentum conserving time stepping"};
    app.set_version_flag("--version", std::string(kVersion) + " (" + git_commit() + ")");
    app.require_subcommand(1);

    RunFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario");
    add_run_flags(run_cmd, run_flags, true);

    std::vector<std::pair<std::string, RunFlags>> named;
    named.reserve(scenario_names().size());
    std::vector<CLI::App*> named_cmds;
    for (const auto& n : scenario_names()) {
        named.emplace_back(n, RunFlags{});
        CLI::App* c = app.add_subcommand(n, "run the " + n + " scenario");
        add_run_flags(c, named.back().second, false);
        named_cmds.push_back(c);
    }

    std::string sweep_name = "all";
    std::string sweep_out = "sweeps";
    std::optional<int> sweep_samples;
    std::optional<double> sweep_tol_b;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "material-point robustness sweeps to CSV");
    sweep_cmd->add_option("name", sweep_name, "comp|shear|mix|scaled_pair|coaxial_pair|all");
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    sweep_cmd->add_option("--samples", sweep_samples, "number of log-spaced samples");
    sweep_cmd->add_option("--tol-b", sweep_tol_b, "switching tolerance (default 0, raw quotient)");

    std::string dump;
    CLI::App* list_cmd = app.add_subcommand("scenarios", "list built-in scenarios");
    list_cmd->add_option("--dump", dump, "print the YAML description of one scenario");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return do_run(run_flags, "");
        for (std::size_t k = 0; k < named_cmds.size(); ++k) {
            if (*named_cmds[k]) return do_run(named[k].second, named[k].first);
        }
        if (*sweep_cmd) {
            std::vector<SweepSpec> specs;
            if (sweep_name == "all") specs = builtin_sweeps();
            else specs.push_back(builtin_sweep(sweep_name));
            std::filesystem::create_directories(sweep_out);
            for (auto& s : specs) {
                if (sweep_samples) s.samples = *sweep_samples;
                if (sweep_tol_b) s.tol_b = *sweep_tol_b;
                const auto rows = run_sweep(s);
                int invalid = 0;
                for (const auto& r : rows) invalid += r.valid ? 0 : 1;
                const auto path = std::filesystem::path(sweep_out) / ("sweep_" + s.name + ".csv");
                std::ofstream f(path);
                if (!f) throw ConfigError("cannot write '" + path.string() + "'");
                write_sweep_csv(f, rows);
                std::cout << s.name << ": " << rows.size() << " rows";
                if (invalid) std::cout << " (" << invalid << " with det F2 <= 0, written as nan)";
                std::cout << " -> " << path.string() << "\n";
            }
            return kExitOk;
        }
        if (*list_cmd) {
            if (!dump.empty()) {
                std::cout << scenario_to_yaml(scenario_by_name(dump));
                return kExitOk;
            }
            for (const auto& n : scenario_names()) {
                const ScenarioSpec s = scenario_by_name(n);
                std::cout << n << "  elements " << s.elements[0] << "x" << s.elements[1] << "x" << s.elements[2]
                          << "  dt " << s.dt << "  T " << s.t_final << "\n";
            }
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MeshError& e) {
        std::cerr << "mesh error: " << e.what() << "\n";
        return kExitMesh;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
