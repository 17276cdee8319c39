#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "incel/config.hpp"
#include "incel/error.hpp"
#include "incel/run.hpp"

using namespace incel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("incel_test_" + name);
    fs::remove_all(p);
    return p;
}

/// Twisting column on a coarse mesh so that runs take a fraction of a second.
std::string coarse_column(const fs::path& out, int steps)
{
    return "scenario: twisting_column\ncustom:\n  elements: [1, 1, 3]\nsolver:\n  steps: " + std::to_string(steps) +
           "\noutput:\n  dir: \"" + out.string() + "\"\n";
}

}  // namespace

TEST_CASE("empty custom section keeps the built-in scenario")
{
    const RunConfig c = parse_config("scenario: twisting_column\ncustom: {}\n");
    CHECK(c.spec == scenario_twisting_column());
    CHECK(c.steps == -1);
    CHECK(c.total_steps() == 500);
    CHECK(parse_config("").spec == scenario_twisting_column());
    CHECK(parse_config("scenario: cantilever\n").spec == scenario_cantilever());
}

TEST_CASE("overrides are reflected in the echoed configuration")
{
    const RunConfig c = parse_config("scenario: cantilever\nsolver:\n  gamma: 100\n  elasticity: conventional\n");
    CHECK(c.spec.gamma == 100.0);
    CHECK(c.solver_config().gamma == 100.0);
    CHECK(c.solver_config().elasticity == ElasticityVariant::conventional);
    const std::string echo = config_to_yaml(c);
    CHECK(echo.find("gamma: 100") != std::string::npos);
    const RunConfig again = parse_config(echo);
    CHECK(again.spec == c.spec);
    CHECK(config_to_yaml(again) == echo);
}

TEST_CASE("configuration round trip keeps every field")
{
    RunConfig c = default_config("cantilever");
    c.spec.elements = {1, 2, 5};
    c.spec.model = OgdenModel{{{1.5, 1.3}, {-0.25, -2.0}}, 7.5};
    c.spec.loads.body.kind = BodyForceKind::rotational;
    c.spec.loads.body.h.a = Vec3(0.1, 0.2, 0.3);
    c.spec.loads.body.h.omega = 0.7;
    c.spec.initial.kind = InitialVelocityKind::uniform;
    c.spec.initial.v0 = Vec3(1.0 / 3.0, 0.1, -2.0);
    c.spec.dt = 0.001;
    c.spec.formula = StressFormula::coaxial;
    c.solver.tol_r = 1e-8;
    c.solver.l_max = 7;
    c.solver.tol_b = 1e-12;
    c.solver.failure = FailurePolicy::halve;
    c.solver.parallel = false;
    c.steps = 12;
    c.output.dir = "some dir";
    c.output.snapshot_every = 3;
    const RunConfig r = parse_config(config_to_yaml(c));
    CHECK(r.spec == c.spec);
    CHECK(r.solver.tol_r == c.solver.tol_r);
    CHECK(r.solver.l_max == 7);
    CHECK(r.solver.tol_b == 1e-12);
    CHECK(r.solver.failure == FailurePolicy::halve);
    CHECK_FALSE(r.solver.parallel);
    CHECK(r.steps == 12);
    CHECK(r.output.dir == "some dir");
    CHECK(r.output.snapshot_every == 3);
}

TEST_CASE("scenario descriptions round trip")
{
    for (const auto& name : scenario_names()) {
        const ScenarioSpec s = scenario_by_name(name);
        CHECK(scenario_from_yaml(scenario_to_yaml(s)) == s);
    }
    CHECK_THROWS_AS(scenario_from_yaml("dt: 0.1\n"), ConfigError);
}

TEST_CASE("configuration errors carry the key and line")
{
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::make_pair(e.line(), std::string(e.what()));
        }
        return std::make_pair(-1, std::string());
    };
    auto [l1, m1] = message("scenario: cantilever\nsolver:\n  dt: 0.0x1\n");
    CHECK(l1 == 3);
    CHECK(m1.find("solver.dt") != std::string::npos);
    auto [l2, m2] = message("scenario: cantilever\nsolver:\n  tol_r: 1e-8\n  gama: 3\n");
    CHECK(l2 == 4);
    CHECK(m2.find("unknown key 'solver.gama'") != std::string::npos);
    auto [l3, m3] = message("solver:\n  dt: -1\n");
    CHECK(l3 == 2);
    CHECK(m3.find("positive") != std::string::npos);
    auto [l4, m4] = message("scenario: propeller\n");
    CHECK(l4 == 1);
    auto [l5, m5] = message("custom:\n  elements: [1, 1]\n");
    CHECK(l5 == 2);
    auto [l6, m6] = message("solver:\n  formula: trapezoid\n");
    CHECK(m6.find("solver.formula") != std::string::npos);
    auto [l7, m7] = message("custom:\n  material:\n    ogden:\n      - {mu: 1}\n");
    CHECK(l7 == 4);
    auto [l8, m8] = message("scenario: [x\n");
    CHECK(m8.find("malformed") != std::string::npos);
    auto [l9, m9] = message("solver:\n  l_max: 2.5\n");
    CHECK(m9.find("integer") != std::string::npos);
    CHECK_THROWS_AS(parse_config("scenario: cantilever\ncustom:\n  clamped: [z1]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("custom:\n  clamped: [q3]\n"), ConfigError);
}

TEST_CASE("scenario files are resolved relative to the configuration")
{
    const fs::path dir = scratch_dir("scenario_file");
    fs::create_directories(dir);
    ScenarioSpec s = scenario_cantilever();
    s.name = "short_beam";
    s.elements = {1, 1, 4};
    {
        std::ofstream f(dir / "beam.yaml");
        f << scenario_to_yaml(s);
        std::ofstream g(dir / "run.yaml");
        g << "scenario_file: beam.yaml\nsolver:\n  steps: 2\n";
    }
    const RunConfig c = load_config((dir / "run.yaml").string());
    CHECK(c.spec == s);
    CHECK(c.steps == 2);
    CHECK_THROWS_AS(parse_config("scenario: cantilever\nscenario_file: beam.yaml\n", dir.string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("run writes the artifacts and is deterministic")
{
    const fs::path a = scratch_dir("run_a"), b = scratch_dir("run_b");
    RunConfig ca = parse_config(coarse_column(a, 10));
    ca.output.snapshot_every = 5;
    const RunSummary sa = run(ca);
    CHECK(sa.exit_code == kExitOk);
    CHECK(sa.steps == 10);
    const std::string hist = slurp(a / "history.csv");
    CHECK(count_lines(hist) == 12);   // header + t = 0 + 10 steps
    CHECK(hist.substr(0, hist.find('\n')) == kHistoryHeader);
    CHECK(count_lines(slurp(a / "steps.log")) == 10);
    CHECK(fs::exists(a / "config.yaml"));
    CHECK(slurp(a / "run_info.yaml").find("history_schema") != std::string::npos);
    CHECK(fs::exists(a / "snapshots" / "step_000000.vtk"));
    CHECK(fs::exists(a / "snapshots" / "step_000010.vtk"));
    CHECK_FALSE(fs::exists(a / "snapshots" / "step_000003.vtk"));
    CHECK(parse_config(slurp(a / "config.yaml")).spec == ca.spec);

    RunConfig cb = parse_config(coarse_column(b, 10));
    cb.output.snapshot_every = 5;
    run(cb);
    CHECK(slurp(b / "history.csv") == hist);
    CHECK(slurp(b / "snapshots" / "step_000010.vtk") == slurp(a / "snapshots" / "step_000010.vtk"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("solver failure gives a nonzero status and keeps partial output")
{
    const fs::path d = scratch_dir("run_fail");
    RunConfig c = parse_config(coarse_column(d, 3));
    c.solver.l_max = 1;
    c.solver.tol_r = 1e-15;
    c.solver.tol_a = 1e-15;
    const RunSummary s = run(c);
    CHECK(s.exit_code == kExitSolver);
    CHECK(s.message.find("step 1") != std::string::npos);
    CHECK(count_lines(slurp(d / "history.csv")) == 2);
    CHECK(count_lines(slurp(d / "steps.log")) == 1);
    fs::remove_all(d);
}

TEST_CASE("monitor and snapshot formats")
{
    const fs::path d = scratch_dir("run_monitor");
    RunConfig c = parse_config("scenario: cantilever\ncustom:\n  elements: [1, 1, 4]\nsolver:\n  steps: 2\n");
    c.output.dir = d.string();
    REQUIRE(run(c).exit_code == kExitOk);
    const std::string mon = slurp(d / "monitor.csv");
    CHECK(mon.substr(0, mon.find('\n')) == kMonitorHeader);
    CHECK(count_lines(mon) == 4);

    ScenarioInstance inst(c.spec);
    std::ostringstream os;
    write_vtk(os, inst, inst.initial_state(), 2);
    const std::string vtk = os.str();
    // lattice (1·2+1) × (1·2+1) × (4·2+1) points, 2 × 2 × 8 cells
    CHECK(vtk.find("POINTS 81 double") != std::string::npos);
    CHECK(vtk.find("CELLS 32 288") != std::string::npos);
    CHECK(vtk.find("VECTORS displacement double") != std::string::npos);
    CHECK(vtk.find("SCALARS pressure double 1") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("sweep CSV has the five columns")
{
    SweepSpec s = builtin_sweep("shear");
    s.samples = 7;
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(s));
    const std::string csv = os.str();
    CHECK(count_lines(csv) == 8);
    CHECK(csv.substr(0, csv.find('\n')) == "xi,dC_norm,S_enh_norm,denominator,numerator");
    const std::string row = csv.substr(csv.find('\n') + 1, csv.find('\n', csv.find('\n') + 1) - csv.find('\n') - 1);
    CHECK(std::count(row.begin(), row.end(), ',') == 4);
}
