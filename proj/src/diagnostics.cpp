#include "incel/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "incel/error.hpp"

namespace incel {

namespace {

template <class F>
void for_each_point(const Assembler& a, F&& f)
{
    const Discretization& d = a.discretization();
    for (int e = 0; e < d.elements(); ++e) {
        const ElementQuadrature& eq = d.element(e);
        for (int q = 0; q < static_cast<int>(eq.weight.size()); ++q) f(e, eq, q);
    }
}

double checked_det(const Tensor3& f, int e)
{
    const double j = f.determinant();
    if (!(j > 0.0)) {
        std::ostringstream os;
        os << "element " << e << " inverted (J = " << j << ")";
        throw MeshError(os.str(), e);
    }
    return j;
}

}  // namespace

double kinetic_energy(const Assembler& a, const State& s)
{
    const double rho0 = a.model().rho0;
    double k = 0.0;
    for_each_point(a, [&](int, const ElementQuadrature& eq, int q) {
        k += eq.weight[q] * 0.5 * rho0 * field_value(eq, s.V, q).squaredNorm();
    });
    return k;
}

double hamiltonian(const Assembler& a, const State& s)
{
    const double rho0 = a.model().rho0;
    double h = 0.0;
    for_each_point(a, [&](int e, const ElementQuadrature& eq, int q) {
        const Tensor3 f = Tensor3::Identity() + field_gradient(eq, s.U, q);
        double g = 0.0;
        try {
            g = g_ich(SymTensor3::right_cauchy_green(f), a.model());
        } catch (const NumericalError& err) {
            throw MeshError("element " + std::to_string(e) + ": " + err.what(), e);
        }
        h += eq.weight[q] * (0.5 * rho0 * field_value(eq, s.V, q).squaredNorm() + g);
    });
    return h;
}

Momenta momenta(const Assembler& a, const State& s)
{
    const double rho0 = a.model().rho0;
    Momenta m;
    for_each_point(a, [&](int, const ElementQuadrature& eq, int q) {
        const Vec3 v = field_value(eq, s.V, q);
        const Vec3 phi = eq.point[q] + field_value(eq, s.U, q);
        m.L += (eq.weight[q] * rho0) * v;
        m.J += (eq.weight[q] * rho0) * phi.cross(v);
    });
    return m;
}

double div_v_norm(const Assembler& a, const State& s)
{
    double acc = 0.0;
    for_each_point(a, [&](int e, const ElementQuadrature& eq, int q) {
        const Tensor3 f = Tensor3::Identity() + field_gradient(eq, s.U, q);
        const double j = checked_det(f, e);
        const double d = field_gradient(eq, s.V, q).cwiseProduct(cofactor(f)).sum();
        acc += eq.weight[q] * d * d / j;
    });
    return std::sqrt(acc);
}

double dissipation(const Assembler& a, const State& n, const State& np1, double gamma)
{
    if (gamma == 0.0) return 0.0;
    const Vector um = 0.5 * (n.U + np1.U);
    const Vector vm = 0.5 * (n.V + np1.V);
    double acc = 0.0;
    for_each_point(a, [&](int e, const ElementQuadrature& eq, int q) {
        const Tensor3 f = Tensor3::Identity() + field_gradient(eq, um, q);
        const double j = checked_det(f, e);
        const double d = field_gradient(eq, vm, q).cwiseProduct(cofactor(f)).sum();
        acc += eq.weight[q] * gamma * d * d / j;
    });
    return acc;
}

ExternalLoads external_loads(const Assembler& a, const State& n, const State& np1)
{
    const double tm = 0.5 * (n.t + np1.t);
    const double rho0 = a.model().rho0;
    const Vector um = 0.5 * (n.U + np1.U);
    const Vector vm = 0.5 * (n.V + np1.V);
    ExternalLoads out;
    const LoadSpec& loads = a.loads();
    if (loads.body.kind != BodyForceKind::none) {
        for_each_point(a, [&](int, const ElementQuadrature& eq, int q) {
            const Vec3 b = (eq.weight[q] * rho0) * loads.body.eval(eq.point[q], tm);
            const Vec3 phi = eq.point[q] + field_value(eq, um, q);
            out.power += field_value(eq, vm, q).dot(b);
            out.force += b;
            out.torque += phi.cross(b);
        });
    }
    for (const Traction& tr : loads.tractions) {
        const Vec3 h = tr.h.eval(tm);
        for (const FaceQuadrature& fq : a.discretization().face(tr.face)) {
            for (int q = 0; q < static_cast<int>(fq.weight.size()); ++q) {
                Vec3 u = Vec3::Zero(), v = Vec3::Zero();
                for (std::size_t k = 0; k < fq.vfun.size(); ++k) {
                    u += fq.nv(q, k) * um.segment<3>(3 * fq.vfun[k]);
                    v += fq.nv(q, k) * vm.segment<3>(3 * fq.vfun[k]);
                }
                const Vec3 hw = fq.weight[q] * h;
                out.power += v.dot(hw);
                out.force += hw;
                out.torque += (fq.point[q] + u).cross(hw);
            }
        }
    }
    return out;
}

StepRecord initial_record(const Assembler& a, const State& s0)
{
    StepRecord r;
    r.t = s0.t;
    r.H = hamiltonian(a, s0);
    const Momenta m = momenta(a, s0);
    r.L = m.L;
    r.J = m.J;
    r.divnorm = div_v_norm(a, s0);
    return r;
}

StepRecord step_record(const Assembler& a, const State& n, const State& np1, const StepRecord& prev, double gamma,
                       int iterations)
{
    StepRecord r = initial_record(a, np1);
    r.dissipation = dissipation(a, n, np1, gamma);
    r.loads = external_loads(a, n, np1);
    r.iters = iterations;
    r.pwr_residual = power_balance_residual(prev, r);
    return r;
}

double power_balance_residual(const StepRecord& rec_n, const StepRecord& rec_np1)
{
    const double dt = rec_np1.t - rec_n.t;
    if (!(dt > 0.0)) return 0.0;
    return std::abs((rec_np1.H - rec_n.H) / dt - rec_np1.loads.power + rec_np1.dissipation);
}

void write_history_row(std::ostream& os, const StepRecord& r)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.t, r.H,
                  r.L[0], r.L[1], r.L[2], r.J[0], r.J[1], r.J[2], r.divnorm, r.dissipation, r.pwr_residual, r.iters);
    os << buf;
}

}  // namespace incel
