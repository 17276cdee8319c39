#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "incel/algostress.hpp"
#include "incel/assembly.hpp"
#include "incel/material.hpp"
#include "incel/solver.hpp"

namespace incel {

// ---------------------------------------------------------------------------
// Material-point sweeps F₂(ξ) = F₁ + ξ D

struct SweepSpec {
    std::string name;
    Tensor3 f1 = Tensor3::Identity();
    Tensor3 d = Tensor3::Zero();
    OgdenModel model = OgdenModel::neo_hookean(5000.0, 1.0);
    StressFormula formula = StressFormula::gonzalez;
    int samples = 300;
    double xi_min = 1e-9;
    double xi_max = 1.0;
    /// Switching tolerance; 0 keeps the raw quotient everywhere it is defined.
    double tol_b = 0.0;
    /// Adds a bisection-refined row at every sign change of the denominator.
    bool refine_sign_changes = false;

    /// Throws ConfigError on a non-positive schedule or singular F₁.
    void validate() const;
};

struct SweepRow {
    double xi = 0.0;
    double dc_norm = 0.0;       ///< ‖C₂ − C₁‖
    double s_enh_norm = 0.0;    ///< ‖S_alg − S_m‖
    double denominator = 0.0;   ///< Z:Z, S_m:Z or C_m:Z
    double numerator = 0.0;     ///< ΔG − S_m:Z
    /// |denominator| over the product of the norms of its two factors.
    double normalized_denominator = 0.0;
    bool valid = true;          ///< false when det F₂ <= 0
    bool refined = false;       ///< inserted root of the denominator
};

/// Rows in increasing ξ; sweeps parallelize over ξ with identical results.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool parallel = true);

/// Compression, shear and mixed cases (gonzalez) and the scaled and coaxial pairs.
std::vector<SweepSpec> builtin_sweeps();
/// Throws ConfigError for an unknown name.
SweepSpec builtin_sweep(const std::string& name);

inline constexpr const char* kSweepHeader = "xi,dC_norm,S_enh_norm,denominator,numerator";

// ---------------------------------------------------------------------------
// Full simulations

enum class InitialVelocityKind { rest, uniform, twist };
const char* to_string(InitialVelocityKind k);
InitialVelocityKind parse_initial_velocity(const std::string& name);

/// uniform: V₀ = v0; twist: V₀ = ω₀ × X with
/// ω₀ = [0, 0, Ω₁ sin(π(X₃ − L/2)/(2L)) + Ω₂].
struct InitialVelocity {
    InitialVelocityKind kind = InitialVelocityKind::rest;
    Vec3 v0 = Vec3::Zero();
    double omega1 = 20.0;
    double omega2 = 5.0;
    double length = 6.0;

    Vec3 eval(const Vec3& x) const;
};

struct ScenarioSpec {
    std::string name;
    /// Single-patch geometry file; the box below is used when empty.
    std::string patch_file;
    Vec3 box_lo = Vec3::Zero();
    Vec3 box_hi = Vec3::Ones();
    std::array<int, 3> elements{1, 1, 1};
    int p = 1;
    int a = 1;
    int b = 0;
    int quad_points = 0;
    OgdenModel model = OgdenModel::neo_hookean(1.0, 1.0);
    InitialVelocity initial;
    LoadSpec loads;
    std::vector<FaceId> clamped;
    double dt = 0.01;
    double t_final = 1.0;
    double gamma = 0.0;
    StressFormula formula = StressFormula::gonzalez;
    bool has_monitor = false;
    Vec3 monitor = Vec3::Zero();

    /// Throws ConfigError; returns a warning (or empty) from the model check.
    std::string validate() const;
    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&);
};

ScenarioSpec scenario_twisting_column();
ScenarioSpec scenario_cantilever();
std::vector<std::string> scenario_names();
/// Throws ConfigError for an unknown name.
ScenarioSpec scenario_by_name(const std::string& name);

/// Discretized scenario ready for stepping. Not movable: the assembler keeps
/// references to the members.
class ScenarioInstance {
public:
    explicit ScenarioInstance(const ScenarioSpec& spec);
    ScenarioInstance(const ScenarioInstance&) = delete;
    ScenarioInstance& operator=(const ScenarioInstance&) = delete;

    const ScenarioSpec& spec() const { return spec_; }
    const Discretization& discretization() const { return disc_; }
    const DofMap& dofs() const { return dofs_; }
    const Assembler& assembler() const { return *asmb_; }

    /// L² projection of the initial velocity; U = 0, P = 0.
    State initial_state() const;
    /// Solver defaults of the scenario (Δt, T, γ, formula).
    SolverConfig solver_config() const;

    /// Parametric preimage of the monitored point.
    const Vec3& monitor_parametric() const { return monitor_u_; }
    /// Displacement or velocity field at parametric point u.
    Vec3 evaluate(const Vector& coef, const Vec3& u) const;

private:
    ScenarioSpec spec_;
    Discretization disc_;
    DofMap dofs_;
    std::unique_ptr<Assembler> asmb_;
    Vec3 monitor_u_ = Vec3::Zero();
};

/// Newton inversion of the geometry map; throws MeshError when X is outside
/// the patch or the iteration fails.
Vec3 invert_geometry(const Geometry& g, const Vec3& x);

}  // namespace incel
