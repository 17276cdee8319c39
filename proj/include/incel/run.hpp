#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "incel/bench.hpp"
#include "incel/config.hpp"

namespace incel {

inline constexpr const char* kVersion = "0.1.0";
/// Commit hash the library was configured from ("unknown" outside git).
const char* git_commit();

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitMesh = 3;

struct RunSummary {
    int exit_code = kExitOk;
    int steps = 0;  ///< completed steps
    std::string message;
};

/// Runs the configured scenario and writes into cfg.output.dir:
///   config.yaml     effective configuration (re-parseable)
///   run_info.yaml   version, commit and CSV schema stamp
///   history.csv     one diagnostics row per step, t = 0 included
///   steps.log       per-step Newton report
///   monitor.csv     U and V at the monitored point, when the scenario has one
///   snapshots/      VTK files every output.snapshot_every steps
/// Artifacts written before a failure are kept. `progress` receives a short
/// line every ~1% of the run.
RunSummary run(const RunConfig& cfg, std::ostream* progress = nullptr);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Legacy ASCII unstructured grid of hexahedra on a lattice with `samples`
/// subdivisions per element edge; reference positions with displacement,
/// velocity and pressure as point data.
void write_vtk(std::ostream& os, const ScenarioInstance& inst, const State& s, int samples,
               const std::string& title = "incel");

void write_step_log(std::ostream& os, int step, double t, const StepReport& rep);

inline constexpr const char* kMonitorHeader = "t,ux,uy,uz,vx,vy,vz";

}  // namespace incel
