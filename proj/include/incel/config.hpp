#pragma once

#include <string>

#include "incel/bench.hpp"
#include "incel/solver.hpp"

namespace incel {

struct OutputConfig {
    std::string dir = "out";
    /// VTK snapshot cadence in steps; 0 disables snapshots.
    int snapshot_every = 0;
    /// Sampling points per element edge for snapshots (>= 1).
    int snapshot_samples = 2;
};

/// Run description. The scenario owns Δt, T, γ and the stress formula; the
/// solver block holds the remaining solver switches.
struct RunConfig {
    /// Built-in scenario used as the base unless scenario_file is set.
    std::string scenario = "twisting_column";
    /// YAML scenario description replacing the built-in base.
    std::string scenario_file;
    ScenarioSpec spec = scenario_twisting_column();
    SolverConfig solver;
    /// Steps to run; negative means T/Δt.
    int steps = -1;
    OutputConfig output;

    /// solver with the scenario's Δt, T, γ and formula applied.
    SolverConfig solver_config() const;
    int total_steps() const;
    /// Throws ConfigError. Returns the model warning, if any.
    std::string validate() const;
};

RunConfig default_config(const std::string& scenario = "twisting_column");

/// Strict YAML parsing: unknown keys, type mismatches and constraint
/// violations raise ConfigError carrying the 1-based line number.
/// Relative scenario_file and patch_file paths are resolved against base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Effective configuration; parse_config of the result reproduces `cfg`.
std::string config_to_yaml(const RunConfig& cfg);

/// Full scenario description including Δt, T, γ and formula.
std::string scenario_to_yaml(const ScenarioSpec& spec);
ScenarioSpec scenario_from_yaml(const std::string& text, const std::string& base_dir = "");

ElasticityVariant parse_elasticity(const std::string& name);
TangentMode parse_tangent_mode(const std::string& name);
const char* to_string(TangentMode m);

}  // namespace incel
