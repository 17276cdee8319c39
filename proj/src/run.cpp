#include "incel/run.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "incel/error.hpp"

#ifndef INCEL_GIT_COMMIT
#define INCEL_GIT_COMMIT "unknown"
#endif

namespace incel {

namespace fs = std::filesystem;

const char* git_commit() { return INCEL_GIT_COMMIT; }

namespace {

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    return f;
}

void write_run_info(const fs::path& p, const RunConfig& cfg)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "version" << YAML::Value << kVersion;
    out << YAML::Key << "commit" << YAML::Value << git_commit();
    out << YAML::Key << "history_schema" << YAML::Value << kHistorySchemaVersion;
    out << YAML::Key << "history_columns" << YAML::Value << kHistoryHeader;
    out << YAML::Key << "scenario" << YAML::Value << cfg.spec.name;
    out << YAML::Key << "steps" << YAML::Value << cfg.total_steps();
#ifdef _OPENMP
    out << YAML::Key << "threads" << YAML::Value << (cfg.solver.parallel ? omp_get_max_threads() : 1);
#else
    out << YAML::Key << "threads" << YAML::Value << 1;
#endif
    out << YAML::EndMap;
    std::ofstream f = open_out(p);
    f << out.c_str() << "\n";
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << kSweepHeader << "\n";
    for (const auto& r : rows) {
        os << g17(r.xi) << ',' << g17(r.dc_norm) << ',' << g17(r.s_enh_norm) << ',' << g17(r.denominator) << ','
           << g17(r.numerator) << "\n";
    }
}

void write_step_log(std::ostream& os, int step, double t, const StepReport& rep)
{
    os << "step " << step << " t=" << g17(t) << " converged=" << (rep.converged ? 1 : 0)
       << " iters=" << rep.iterations << " criterion=" << to_string(rep.criterion) << " dt=" << g17(rep.dt)
       << " halvings=" << rep.halvings << " backward_error=" << std::setprecision(3) << rep.max_backward_error
       << " residuals=";
    for (std::size_t k = 0; k < rep.residual_norms.size(); ++k) {
        os << (k ? "," : "") << std::setprecision(6) << rep.residual_norms[k];
    }
    if (!rep.message.empty()) os << " msg=\"" << rep.message << '"';
    os << "\n";
}

void write_vtk(std::ostream& os, const ScenarioInstance& inst, const State& s, int samples, const std::string& title)
{
    if (samples < 1) throw ConfigError("snapshot samples must be positive");
    const Discretization& d = inst.discretization();
    const MixedSpaces& sp = d.spaces();
    std::array<std::vector<double>, 3> grid;
    for (int k = 0; k < 3; ++k) {
        const auto& br = sp.velocity.knots(k).breaks();
        for (std::size_t e = 0; e + 1 < br.size(); ++e) {
            for (int j = 0; j < samples; ++j) grid[k].push_back(br[e] + (br[e + 1] - br[e]) * j / samples);
        }
        grid[k].push_back(br.back());
    }
    const int n0 = static_cast<int>(grid[0].size()), n1 = static_cast<int>(grid[1].size()),
              n2 = static_cast<int>(grid[2].size());
    const int npts = n0 * n1 * n2;
    std::vector<Vec3> x(npts), u(npts), v(npts);
    std::vector<double> pr(npts);
    for (int k = 0; k < n2; ++k) {
        for (int j = 0; j < n1; ++j) {
            for (int i = 0; i < n0; ++i) {
                const int id = i + n0 * (j + n1 * k);
                const Vec3 par(grid[0][i], grid[1][j], grid[2][k]);
                x[id] = d.geometry().map(par);
                const BasisValues bv = sp.velocity.eval(par);
                u[id].setZero();
                v[id].setZero();
                for (std::size_t q = 0; q < bv.index.size(); ++q) {
                    u[id] += bv.value[q] * s.U.segment<3>(3 * bv.index[q]);
                    v[id] += bv.value[q] * s.V.segment<3>(3 * bv.index[q]);
                }
                const BasisValues bp = sp.pressure.eval(par);
                pr[id] = 0.0;
                for (std::size_t q = 0; q < bp.index.size(); ++q) pr[id] += bp.value[q] * s.P[bp.index[q]];
            }
        }
    }
    const int ncells = (n0 - 1) * (n1 - 1) * (n2 - 1);
    os << "# vtk DataFile Version 3.0\n" << title << " t=" << g17(s.t) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << npts << " double\n";
    for (const auto& p : x) os << g17(p[0]) << ' ' << g17(p[1]) << ' ' << g17(p[2]) << "\n";
    os << "CELLS " << ncells << ' ' << 9 * ncells << "\n";
    auto id = [&](int i, int j, int k) { return i + n0 * (j + n1 * k); };
    for (int k = 0; k + 1 < n2; ++k) {
        for (int j = 0; j + 1 < n1; ++j) {
            for (int i = 0; i + 1 < n0; ++i) {
                os << 8 << ' ' << id(i, j, k) << ' ' << id(i + 1, j, k) << ' ' << id(i + 1, j + 1, k) << ' '
                   << id(i, j + 1, k) << ' ' << id(i, j, k + 1) << ' ' << id(i + 1, j, k + 1) << ' '
                   << id(i + 1, j + 1, k + 1) << ' ' << id(i, j + 1, k + 1) << "\n";
            }
        }
    }
    os << "CELL_TYPES " << ncells << "\n";
    for (int c = 0; c < ncells; ++c) os << "12\n";
    os << "POINT_DATA " << npts << "\n";
    os << "VECTORS displacement double\n";
    for (const auto& p : u) os << g17(p[0]) << ' ' << g17(p[1]) << ' ' << g17(p[2]) << "\n";
    os << "VECTORS velocity double\n";
    for (const auto& p : v) os << g17(p[0]) << ' ' << g17(p[1]) << ' ' << g17(p[2]) << "\n";
    os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (double p : pr) os << g17(p) << "\n";
}

RunSummary run(const RunConfig& cfg, std::ostream* progress)
{
    RunSummary sum;
    const fs::path dir(cfg.output.dir);
    fs::create_directories(dir);
    {
        std::ofstream f = open_out(dir / "config.yaml");
        f << config_to_yaml(cfg);
    }
    write_run_info(dir / "run_info.yaml", cfg);

    const ScenarioInstance inst(cfg.spec);
    const SolverConfig sc = cfg.solver_config();
    const int nsteps = cfg.total_steps();

    std::ofstream hist = open_out(dir / "history.csv");
    hist << kHistoryHeader << "\n";
    std::ofstream log = open_out(dir / "steps.log");
    std::ofstream mon;
    if (cfg.spec.has_monitor) {
        mon = open_out(dir / "monitor.csv");
        mon << kMonitorHeader << "\n";
    }
    if (cfg.output.snapshot_every > 0) fs::create_directories(dir / "snapshots");

    const int every = std::max(1, nsteps / 100);
    auto cb = [&](int step, const State& s, const StepRecord& rec, const StepReport& rep) {
        write_history_row(hist, rec);
        hist.flush();
        if (step > 0) {
            write_step_log(log, step, s.t, rep);
            log.flush();
        }
        if (mon.is_open()) {
            const Vec3 u = inst.evaluate(s.U, inst.monitor_parametric());
            const Vec3 v = inst.evaluate(s.V, inst.monitor_parametric());
            mon << g17(s.t) << ',' << g17(u[0]) << ',' << g17(u[1]) << ',' << g17(u[2]) << ',' << g17(v[0]) << ','
                << g17(v[1]) << ',' << g17(v[2]) << "\n";
        }
        if (cfg.output.snapshot_every > 0 && step % cfg.output.snapshot_every == 0) {
            char name[32];
            std::snprintf(name, sizeof name, "step_%06d.vtk", step);
            std::ofstream f = open_out(dir / "snapshots" / name);
            write_vtk(f, inst, s, cfg.output.snapshot_samples, cfg.spec.name);
        }
        if (progress && step > 0 && (step % every == 0 || step == nsteps)) {
            *progress << "step " << step << "/" << nsteps << " t=" << s.t << " iters=" << rep.iterations
                      << " H=" << std::setprecision(12) << rec.H << "\n"
                      << std::setprecision(6);
        }
        sum.steps = step;
    };

    SimulationResult res;
    try {
        res = simulate(inst.assembler(), inst.initial_state(), sc, nsteps, cb);
    } catch (const MeshError& e) {
        sum.exit_code = kExitMesh;
        sum.message = e.what();
        return sum;
    }
    if (!res.ok) {
        if (!res.reports.empty()) write_step_log(log, sum.steps + 1, res.final_state.t, res.reports.back());
        sum.exit_code = kExitSolver;
        sum.message = res.message;
    }
    return sum;
}

}  // namespace incel
