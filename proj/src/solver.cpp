#include "incel/solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/UmfPackSupport>

#include "incel/error.hpp"

namespace incel {

const char* to_string(FailurePolicy p)
{
    switch (p) {
    case FailurePolicy::abort: return "abort";
    case FailurePolicy::halve: return "halve";
    case FailurePolicy::accept: return "accept";
    }
    return "?";
}

FailurePolicy parse_failure_policy(const std::string& name)
{
    if (name == "abort") return FailurePolicy::abort;
    if (name == "halve") return FailurePolicy::halve;
    if (name == "accept") return FailurePolicy::accept;
    throw ConfigError("unknown failure policy '" + name + "' (abort|halve|accept)");
}

const char* to_string(StopCriterion c)
{
    switch (c) {
    case StopCriterion::none: return "none";
    case StopCriterion::relative: return "relative";
    case StopCriterion::absolute: return "absolute";
    }
    return "?";
}

AssemblyOptions SolverConfig::assembly() const
{
    AssemblyOptions o;
    o.gamma = gamma;
    o.formula = formula;
    o.tol_b = tol_b;
    o.elasticity = elasticity;
    o.tangent = tangent;
    o.parallel = parallel;
    return o;
}

int SolverConfig::steps() const { return static_cast<int>(std::llround(t_final / dt)); }

void SolverConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
    if (!(tol_r >= 0.0) || !(tol_a >= 0.0)) throw ConfigError("tolerances must be non-negative");
    if (l_max < 1) throw ConfigError("l_max must be at least 1");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    if (!(tol_b >= 0.0)) throw ConfigError("tol_b must be non-negative");
}

// ---------------------------------------------------------------------------

struct SaddleSolver::Impl {
    Eigen::UmfPackLU<SparseMatrix> lu;
    const SparseMatrix* k = nullptr;
    Eigen::Index nnz = -1;
    Eigen::Index rows = -1;
};

SaddleSolver::SaddleSolver() : impl_(std::make_unique<Impl>()) {}
SaddleSolver::~SaddleSolver() = default;

void SaddleSolver::factorize(const SparseMatrix& k)
{
    if (!k.isCompressed()) throw NumericalError("saddle matrix must be compressed");
    Impl& s = *impl_;
    if (s.rows != k.rows() || s.nnz != k.nonZeros()) {
        s.lu.analyzePattern(k);
        s.rows = k.rows();
        s.nnz = k.nonZeros();
    }
    s.lu.factorize(k);
    if (s.lu.info() != Eigen::Success) {
        s.rows = -1;
        throw NumericalError("sparse LU factorization failed (singular saddle-point matrix)");
    }
    s.k = &k;
}

Vector SaddleSolver::solve(const Vector& rhs)
{
    Impl& s = *impl_;
    Vector x = s.lu.solve(rhs);
    if (s.lu.info() != Eigen::Success || !x.allFinite()) throw NumericalError("sparse LU solve failed");
    const double rn = rhs.norm();
    Vector res = (*s.k) * x - rhs;
    backward_error_ = rn > 0.0 ? res.norm() / rn : res.norm();
    // Iterative refinement in case the pivoting lost digits.
    for (int it = 0; it < 3 && backward_error_ > 1e-14; ++it) {
        const Vector dx = s.lu.solve(res);
        const Vector x2 = x - dx;
        const Vector res2 = (*s.k) * x2 - rhs;
        const double be2 = rn > 0.0 ? res2.norm() / rn : res2.norm();
        if (!(be2 < backward_error_)) break;
        x = x2;
        res = res2;
        backward_error_ = be2;
    }
    return x;
}

Increment newton_step_solve(const TangentBlocks& b, const Vector& rm, const Vector& rp)
{
    const Eigen::Index nv = b.A.rows();
    const Eigen::Index np = b.C.rows();
    std::vector<Eigen::Triplet<double, int>> t;
    t.reserve(b.A.nonZeros() + b.B.nonZeros() + b.C.nonZeros());
    auto add = [&](const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0) {
        for (int j = 0; j < m.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
                t.emplace_back(static_cast<int>(it.row() + r0), static_cast<int>(it.col() + c0), it.value());
            }
        }
    };
    add(b.A, 0, 0);
    add(b.B, 0, nv);
    add(b.C, nv, 0);
    SparseMatrix k(nv + np, nv + np);
    k.setFromTriplets(t.begin(), t.end());
    k.makeCompressed();
    Vector rhs(nv + np);
    rhs << -rm, -rp;
    SaddleSolver s;
    s.factorize(k);
    const Vector x = s.solve(rhs);
    Increment inc;
    inc.dv = x.head(nv);
    inc.dp = x.tail(np);
    inc.backward_error = s.backward_error();
    return inc;
}

Vector displacement_update(const Vector& dv, double dt, const Vector& rk) { return dt * (0.5 * dv - rk); }

// ---------------------------------------------------------------------------

Stepper::Stepper(const Assembler& a, SolverConfig cfg) : a_(a), cfg_(std::move(cfg))
{
    cfg_.validate();
    k_ = a_.pattern();
}

State Stepper::solve_step(const State& n, double dt, StepReport& rep)
{
    const DofMap& dofs = a_.dofs();
    const AssemblyOptions opt = cfg_.assembly();
    const int nvel3 = 3 * dofs.n_vel;
    rep.dt = dt;

    State y = n;   // predictor
    y.t = n.t + dt;
    double r0 = 0.0;
    Residual res;
    for (int l = 0;; ++l) {
        res = a_.residual(n, y, dt, opt);
        const Vector rf = a_.free_residual(res);
        const double rn = rf.norm();
        if (!std::isfinite(rn)) throw NumericalError("non-finite residual");
        rep.residual_norms.push_back(rn);
        if (l == 0) r0 = rn;
        // The predictor is only accepted when it is kinematically consistent.
        const bool kin_ok = l > 0 || residual_kinematic(n, y, dt).norm() <= cfg_.tol_a;
        if (kin_ok) {
            if (l > 0 && r0 > 0.0 && rn / r0 <= cfg_.tol_r) {
                rep.converged = true;
                rep.criterion = StopCriterion::relative;
                return y;
            }
            if (rn <= cfg_.tol_a) {
                rep.converged = true;
                rep.criterion = StopCriterion::absolute;
                return y;
            }
        }
        if (l == cfg_.l_max) break;

        a_.system(n, y, dt, opt, res, k_);
        lu_.factorize(k_);
        const Vector delta = lu_.solve(-rf);
        rep.max_backward_error = std::max(rep.max_backward_error, lu_.backward_error());

        const Vector rk = residual_kinematic(n, y, dt);
        Vector dv = Vector::Zero(nvel3);
        for (int i = 0; i < nvel3; ++i) {
            if (dofs.free_index[i] >= 0) dv[i] = delta[dofs.free_index[i]];
        }
        y.V += dv;
        y.U += displacement_update(dv, dt, rk);
        for (int b = 0; b < dofs.n_pres; ++b) y.P[b] += delta[dofs.free_index[nvel3 + b]];
        ++rep.iterations;
    }
    std::ostringstream os;
    os << "no convergence within " << cfg_.l_max << " iterations (residual " << rep.residual_norms.back()
       << ", initial " << r0 << ")";
    rep.message = os.str();
    return y;
}

State Stepper::advance(const State& n, StepReport& rep)
{
    rep = StepReport{};
    State y;
    try {
        y = solve_step(n, cfg_.dt, rep);
    } catch (const Error& e) {
        rep.converged = false;
        rep.message = e.what();
        y = n;
    }
    if (rep.converged || cfg_.failure != FailurePolicy::halve) return y;

    // One retry with two half steps.
    StepReport first, second;
    try {
        const State mid = solve_step(n, 0.5 * cfg_.dt, first);
        if (first.converged) {
            y = solve_step(mid, 0.5 * cfg_.dt, second);
            y.t = n.t + cfg_.dt;
        }
    } catch (const Error& e) {
        second.message = e.what();
    }
    StepReport out;
    out.halvings = 1;
    out.dt = cfg_.dt;
    out.iterations = rep.iterations + first.iterations + second.iterations;
    out.residual_norms = rep.residual_norms;
    out.residual_norms.insert(out.residual_norms.end(), first.residual_norms.begin(), first.residual_norms.end());
    out.residual_norms.insert(out.residual_norms.end(), second.residual_norms.begin(), second.residual_norms.end());
    out.converged = first.converged && second.converged;
    out.criterion = second.criterion;
    out.max_backward_error = std::max({rep.max_backward_error, first.max_backward_error, second.max_backward_error});
    out.message = out.converged ? "converged after halving: " + rep.message
                                : "failed after halving: " + (first.converged ? second.message : first.message);
    rep = out;
    return out.converged ? y : n;
}

State advance_step(const Assembler& a, const State& n, const SolverConfig& cfg, StepReport* report)
{
    Stepper s(a, cfg);
    StepReport r;
    State out = s.advance(n, r);
    if (report) *report = std::move(r);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

SparseMatrix scalar_mass(const Discretization& d, bool velocity)
{
    const int n = velocity ? d.n_vel() : d.n_pres();
    std::vector<Eigen::Triplet<double, int>> t;
    for (int e = 0; e < d.elements(); ++e) {
        const ElementQuadrature& eq = d.element(e);
        const Eigen::MatrixXd& nm = velocity ? eq.nv : eq.np;
        const std::vector<int>& fun = velocity ? eq.vfun : eq.pfun;
        Eigen::MatrixXd m = nm.transpose() * Eigen::Map<const Eigen::VectorXd>(eq.weight.data(), eq.weight.size()).asDiagonal() * nm;
        for (int b = 0; b < m.cols(); ++b) {
            for (int a = 0; a < m.rows(); ++a) t.emplace_back(fun[a], fun[b], m(a, b));
        }
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

}  // namespace

Vector project_velocity(const Discretization& d, const DofMap& dofs, const std::function<Vec3(const Vec3&)>& f)
{
    const int n = d.n_vel();
    const SparseMatrix m = scalar_mass(d, true);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 3);
    for (int e = 0; e < d.elements(); ++e) {
        const ElementQuadrature& eq = d.element(e);
        for (int q = 0; q < static_cast<int>(eq.weight.size()); ++q) {
            const Vec3 v = eq.weight[q] * f(eq.point[q]);
            for (std::size_t a = 0; a < eq.vfun.size(); ++a) rhs.row(eq.vfun[a]) += eq.nv(q, a) * v.transpose();
        }
    }
    Vector out = Vector::Zero(3 * n);
    for (int i = 0; i < 3; ++i) {
        std::vector<int> free;
        std::vector<int> map(n, -1);
        for (int g = 0; g < n; ++g) {
            if (!dofs.fixed[3 * g + i]) {
                map[g] = static_cast<int>(free.size());
                free.push_back(g);
            }
        }
        std::vector<Eigen::Triplet<double, int>> t;
        for (int j = 0; j < m.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
                if (map[it.row()] >= 0 && map[it.col()] >= 0) t.emplace_back(map[it.row()], map[it.col()], it.value());
            }
        }
        const int nf = static_cast<int>(free.size());
        SparseMatrix mr(nf, nf);
        mr.setFromTriplets(t.begin(), t.end());
        Vector b(nf);
        for (int k = 0; k < nf; ++k) b[k] = rhs(free[k], i);
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(mr);
        if (ldlt.info() != Eigen::Success) throw NumericalError("velocity mass matrix factorization failed");
        const Vector x = ldlt.solve(b);
        for (int k = 0; k < nf; ++k) out[3 * free[k] + i] = x[k];
    }
    return out;
}

Vector project_pressure(const Discretization& d, const std::function<double(const Vec3&)>& f)
{
    const SparseMatrix m = scalar_mass(d, false);
    Vector rhs = Vector::Zero(d.n_pres());
    for (int e = 0; e < d.elements(); ++e) {
        const ElementQuadrature& eq = d.element(e);
        for (int q = 0; q < static_cast<int>(eq.weight.size()); ++q) {
            const double v = eq.weight[q] * f(eq.point[q]);
            for (std::size_t b = 0; b < eq.pfun.size(); ++b) rhs[eq.pfun[b]] += eq.np(q, b) * v;
        }
    }
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(m);
    if (ldlt.info() != Eigen::Success) throw NumericalError("pressure mass matrix factorization failed");
    return ldlt.solve(rhs);
}

// ---------------------------------------------------------------------------

SimulationResult simulate(const Assembler& a, const State& s0, const SolverConfig& cfg, int steps,
                          const StepCallback& callback)
{
    Stepper stepper(a, cfg);
    if (steps < 0) steps = cfg.steps();
    SimulationResult out;
    out.final_state = s0;
    out.history.push_back(initial_record(a, s0));
    if (callback) callback(0, s0, out.history.back(), StepReport{});
    for (int k = 1; k <= steps; ++k) {
        StepReport rep;
        State next = stepper.advance(out.final_state, rep);
        if (!rep.converged && cfg.failure != FailurePolicy::accept) {
            out.reports.push_back(rep);
            out.ok = false;
            std::ostringstream os;
            os << "step " << k << " (t = " << next.t << "): " << rep.message;
            out.message = os.str();
            return out;
        }
        StepRecord rec;
        try {
            rec = step_record(a, out.final_state, next, out.history.back(), cfg.gamma, rep.iterations);
        } catch (const Error& e) {
            out.reports.push_back(rep);
            out.ok = false;
            out.message = "step " + std::to_string(k) + ": " + e.what();
            return out;
        }
        out.final_state = std::move(next);
        out.history.push_back(rec);
        out.reports.push_back(rep);
        if (callback) callback(k, out.final_state, rec, rep);
    }
    return out;
}

}  // namespace incel
