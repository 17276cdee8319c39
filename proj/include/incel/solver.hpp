#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "incel/assembly.hpp"
#include "incel/diagnostics.hpp"

namespace incel {

enum class FailurePolicy { abort, halve, accept };
const char* to_string(FailurePolicy p);
FailurePolicy parse_failure_policy(const std::string& name);

struct SolverConfig {
    double tol_r = 1e-10;
    double tol_a = 1e-10;
    int l_max = 10;
    double dt = 0.01;
    double t_final = 1.0;
    double gamma = 0.0;
    StressFormula formula = StressFormula::gonzalez;
    double tol_b = kDefaultTolB;
    ElasticityVariant elasticity = ElasticityVariant::corrected;
    TangentMode tangent = TangentMode::analytic;
    FailurePolicy failure = FailurePolicy::abort;
    bool parallel = true;

    AssemblyOptions assembly() const;
    /// Number of steps to reach t_final.
    int steps() const;
    /// Throws ConfigError on non-positive step, tolerances or iteration limit.
    void validate() const;
};

enum class StopCriterion { none, relative, absolute };
const char* to_string(StopCriterion c);

struct StepReport {
    /// Linear solves performed.
    int iterations = 0;
    /// ‖(R^m, R^p)‖ at every convergence check, predictor first.
    std::vector<double> residual_norms;
    bool converged = false;
    StopCriterion criterion = StopCriterion::none;
    double dt = 0.0;
    int halvings = 0;
    double max_backward_error = 0.0;
    std::string message;
};

/// Sparse direct LU (UMFPACK) of the saddle-point matrix. The symbolic
/// analysis is kept while the sparsity pattern is unchanged.
class SaddleSolver {
public:
    SaddleSolver();
    ~SaddleSolver();
    SaddleSolver(const SaddleSolver&) = delete;
    SaddleSolver& operator=(const SaddleSolver&) = delete;

    /// Throws NumericalError when the matrix is singular.
    void factorize(const SparseMatrix& k);
    /// Solves K x = rhs; backward_error() is ‖K x − rhs‖/‖rhs‖.
    Vector solve(const Vector& rhs);
    double backward_error() const { return backward_error_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    double backward_error_ = 0.0;
};

struct Increment {
    Vector dv;
    Vector dp;
    double backward_error = 0.0;
};

/// Solves [[A, B], [C, 0]] (ΔV, ΔP) = −(R^m, R^p).
Increment newton_step_solve(const TangentBlocks& blocks, const Vector& rm, const Vector& rp);

/// ΔU = Δt (ΔV/2 − R^k).
Vector displacement_update(const Vector& dv, double dt, const Vector& rk);

/// Predictor multi-corrector stepping with a persistent factorization.
class Stepper {
public:
    Stepper(const Assembler& a, SolverConfig cfg);

    const SolverConfig& config() const { return cfg_; }
    const Assembler& assembler() const { return a_; }

    /// One step of size config().dt with the failure policy applied. The
    /// returned report has converged = false when the step failed; with the
    /// abort policy the returned state is then the last iterate.
    State advance(const State& n, StepReport& report);

    /// Newton iteration for one step of size dt, no failure handling.
    State solve_step(const State& n, double dt, StepReport& report);

private:
    const Assembler& a_;
    SolverConfig cfg_;
    SaddleSolver lu_;
    SparseMatrix k_;
};

State advance_step(const Assembler& a, const State& n, const SolverConfig& cfg, StepReport* report = nullptr);

/// L² projections onto the velocity space (constrained coefficients set to
/// zero) and onto the pressure space.
Vector project_velocity(const Discretization& d, const DofMap& dofs, const std::function<Vec3(const Vec3&)>& f);
Vector project_pressure(const Discretization& d, const std::function<double(const Vec3&)>& f);

struct SimulationResult {
    State final_state;
    std::vector<StepRecord> history;     ///< includes the initial row
    std::vector<StepReport> reports;
    bool ok = true;
    std::string message;
};

/// Called after the initial record (step 0, empty report) and after every step.
using StepCallback = std::function<void(int step, const State& s, const StepRecord& rec, const StepReport& rep)>;

/// Runs `steps` steps (config().steps() when negative).
SimulationResult simulate(const Assembler& a, const State& s0, const SolverConfig& cfg, int steps = -1,
                          const StepCallback& callback = {});

}  // namespace incel
