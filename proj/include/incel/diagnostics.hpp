#pragma once

#include <iosfwd>
#include <string>

#include "incel/assembly.hpp"

namespace incel {

/// ∫ ρ₀‖V‖²/2 + G_ich(C̃) over the reference domain.
double hamiltonian(const Assembler& a, const State& s);
double kinetic_energy(const Assembler& a, const State& s);

struct Momenta {
    Vec3 L = Vec3::Zero();   ///< ∫ ρ₀ V
    Vec3 J = Vec3::Zero();   ///< ∫ ρ₀ φ × V, φ = X + U
};
Momenta momenta(const Assembler& a, const State& s);

/// (∫ J (∇_X V : F⁻ᵀ)² dΩ_X)^{1/2}, the L² norm of ∇·v on the current configuration.
double div_v_norm(const Assembler& a, const State& s);

/// D_m = ∫ γ J_m (∇_X V_m : F_m⁻ᵀ)² dΩ_X.
double dissipation(const Assembler& a, const State& n, const State& np1, double gamma);

/// Loads of the step n → n+1 evaluated at t_m with V_m and φ_m.
struct ExternalLoads {
    double power = 0.0;                ///< ∫ ρ₀ V_m·B_m + ∫_Γ V_m·H_m
    Vec3 force = Vec3::Zero();         ///< ∫ ρ₀ B_m + ∫_Γ H_m
    Vec3 torque = Vec3::Zero();        ///< ∫ ρ₀ φ_m × B_m + ∫_Γ φ_m × H_m
};
ExternalLoads external_loads(const Assembler& a, const State& n, const State& np1);

/// One row of the time history. Step quantities (dissipation, external
/// loads, residual) refer to the step that ended at t; they are zero on the
/// initial row.
struct StepRecord {
    double t = 0.0;
    double H = 0.0;
    Vec3 L = Vec3::Zero();
    Vec3 J = Vec3::Zero();
    double divnorm = 0.0;
    double dissipation = 0.0;
    ExternalLoads loads;
    double pwr_residual = 0.0;
    int iters = 0;
};

StepRecord initial_record(const Assembler& a, const State& s0);
/// Record of the converged step n → n+1, including the power-balance residual.
StepRecord step_record(const Assembler& a, const State& n, const State& np1, const StepRecord& prev, double gamma,
                       int iterations);

/// |(H_{n+1} − H_n)/Δt − P_ext,m + D_m| with the loads and dissipation stored in rec_np1.
double power_balance_residual(const StepRecord& rec_n, const StepRecord& rec_np1);

/// CSV schema of the history file.
inline constexpr const char* kHistorySchemaVersion = "1";
inline constexpr const char* kHistoryHeader = "t,H,Lx,Ly,Lz,Jx,Jy,Jz,divnorm,dissipation,pwr_residual,iters";
void write_history_row(std::ostream& os, const StepRecord& r);

}  // namespace incel
