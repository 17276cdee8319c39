#include "incel/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include <omp.h>

#include "incel/error.hpp"

namespace incel {

FaceId parse_face(const std::string& name)
{
    if (name.size() == 2 && name[0] >= 'x' && name[0] <= 'z' && (name[1] == '0' || name[1] == '1')) {
        return FaceId{name[0] - 'x', name[1] - '0'};
    }
    throw ConfigError("unknown face '" + name + "' (x0|x1|y0|y1|z0|z1)");
}

std::string to_string(FaceId f)
{
    return std::string(1, static_cast<char>('x' + f.dir)) + static_cast<char>('0' + f.side);
}

// ---------------------------------------------------------------------------
// Discretization

Discretization::Discretization(Geometry geometry, MixedSpaces spaces, int quad_points)
    : geometry_(std::move(geometry)), spaces_(std::move(spaces))
{
    nq_ = quad_points > 0 ? quad_points : spaces_.p + spaces_.a + 2;
    const TensorSpace& vs = spaces_.velocity;
    const TensorSpace& ps = spaces_.pressure;
    for (int d = 0; d < 3; ++d) {
        if (vs.knots(d).breaks() != ps.knots(d).breaks()) {
            throw ConfigError("velocity and pressure spaces must share the element partition");
        }
    }
    const QuadratureRule rule = gauss_legendre(nq_);
    const int ne = vs.elements();
    elem_.resize(ne);
    BasisValues bv, bp;
    for (int e = 0; e < ne; ++e) {
        const auto em = vs.element_multi_index(e);
        Vec3 lo, h;
        for (int d = 0; d < 3; ++d) {
            const auto& br = vs.knots(d).breaks();
            lo[d] = br[em[d]];
            h[d] = br[em[d] + 1] - br[em[d]];
        }
        ElementQuadrature& eq = elem_[e];
        eq.vfun = vs.element_functions(e);
        eq.pfun = ps.element_functions(e);
        const int nqp = nq_ * nq_ * nq_;
        const int nv = static_cast<int>(eq.vfun.size());
        const int np = static_cast<int>(eq.pfun.size());
        eq.weight.resize(nqp);
        eq.point.resize(nqp);
        eq.nv.resize(nqp, nv);
        eq.np.resize(nqp, np);
        eq.dnv.assign(nqp, Eigen::Matrix3Xd(3, nv));
        for (int q2 = 0; q2 < nq_; ++q2) {
            for (int q1 = 0; q1 < nq_; ++q1) {
                for (int q0 = 0; q0 < nq_; ++q0) {
                    const int q = q0 + nq_ * (q1 + nq_ * q2);
                    const Vec3 u(lo[0] + h[0] * rule.points[q0], lo[1] + h[1] * rule.points[q1],
                                 lo[2] + h[2] * rule.points[q2]);
                    Tensor3 jac;
                    try {
                        eq.point[q] = geometry_.map(u, &jac);
                    } catch (const MeshError& err) {
                        throw MeshError(err.what(), e);
                    }
                    eq.weight[q] = rule.weights[q0] * rule.weights[q1] * rule.weights[q2] * h[0] * h[1] * h[2] *
                                   jac.determinant();
                    const Tensor3 jit = jac.inverse().transpose();
                    vs.eval_element(e, u, bv);
                    ps.eval_element(e, u, bp);
                    for (int a = 0; a < nv; ++a) {
                        eq.nv(q, a) = bv.value[a];
                        eq.dnv[q].col(a) = jit * bv.grad[a];
                    }
                    for (int b = 0; b < np; ++b) eq.np(q, b) = bp.value[b];
                }
            }
        }
    }

    for (int d = 0; d < 3; ++d) {
        const int d1 = (d + 1) % 3;
        const int d2 = (d + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            auto& list = faces_[2 * d + side];
            for (int e = 0; e < ne; ++e) {
                const auto em = vs.element_multi_index(e);
                if (em[d] != (side == 0 ? 0 : vs.elements(d) - 1)) continue;
                FaceQuadrature fq;
                fq.element = e;
                fq.vfun = elem_[e].vfun;
                const int nv = static_cast<int>(fq.vfun.size());
                const int nqf = nq_ * nq_;
                fq.weight.resize(nqf);
                fq.point.resize(nqf);
                fq.nv.resize(nqf, nv);
                const auto& b1 = vs.knots(d1).breaks();
                const auto& b2 = vs.knots(d2).breaks();
                const double lo1 = b1[em[d1]], h1 = b1[em[d1] + 1] - lo1;
                const double lo2 = b2[em[d2]], h2 = b2[em[d2] + 1] - lo2;
                for (int q2 = 0; q2 < nq_; ++q2) {
                    for (int q1 = 0; q1 < nq_; ++q1) {
                        const int q = q1 + nq_ * q2;
                        Vec3 u;
                        u[d] = side;
                        u[d1] = lo1 + h1 * rule.points[q1];
                        u[d2] = lo2 + h2 * rule.points[q2];
                        Tensor3 jac;
                        try {
                            fq.point[q] = geometry_.map(u, &jac);
                        } catch (const MeshError& err) {
                            throw MeshError(err.what(), e);
                        }
                        fq.weight[q] =
                            rule.weights[q1] * rule.weights[q2] * h1 * h2 * jac.col(d1).cross(jac.col(d2)).norm();
                        vs.eval_element(e, u, bv);
                        for (int a = 0; a < nv; ++a) fq.nv(q, a) = bv.value[a];
                    }
                }
                list.push_back(std::move(fq));
            }
        }
    }
}

double Discretization::volume() const
{
    double v = 0.0;
    for (const auto& eq : elem_) {
        for (double w : eq.weight) v += w;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Dofs, state, loads

DofMap DofMap::build(const Discretization& d, const std::vector<FaceId>& clamped_faces)
{
    DofMap m;
    m.n_vel = d.n_vel();
    m.n_pres = d.n_pres();
    m.clamped = clamped_faces;
    m.fixed.assign(3 * m.n_vel, 0);
    for (const FaceId& f : clamped_faces) {
        if (f.dir < 0 || f.dir > 2 || f.side < 0 || f.side > 1) throw ConfigError("invalid clamped face");
        for (int g : d.spaces().velocity.face_functions(f.dir, f.side)) {
            for (int i = 0; i < 3; ++i) m.fixed[3 * g + i] = 1;
        }
    }
    m.free_index.assign(3 * m.n_vel + m.n_pres, -1);
    int k = 0;
    for (int i = 0; i < 3 * m.n_vel; ++i) {
        if (!m.fixed[i]) m.free_index[i] = k++;
    }
    m.n_free_vel = k;
    for (int b = 0; b < m.n_pres; ++b) m.free_index[3 * m.n_vel + b] = k++;
    return m;
}

State State::zero(const Discretization& d)
{
    State s;
    s.U = Vector::Zero(3 * d.n_vel());
    s.V = Vector::Zero(3 * d.n_vel());
    s.P = Vector::Zero(d.n_pres());
    return s;
}

Vec3 Harmonic::eval(double t) const
{
    if (omega == 0.0) return c + a;
    return c + a * std::cos(omega * t) + b * std::sin(omega * t);
}

const char* to_string(BodyForceKind k)
{
    switch (k) {
    case BodyForceKind::none: return "none";
    case BodyForceKind::constant: return "constant";
    case BodyForceKind::harmonic: return "harmonic";
    case BodyForceKind::rotational: return "rotational";
    }
    return "?";
}

BodyForceKind parse_body_force(const std::string& name)
{
    if (name == "none") return BodyForceKind::none;
    if (name == "constant") return BodyForceKind::constant;
    if (name == "harmonic") return BodyForceKind::harmonic;
    if (name == "rotational") return BodyForceKind::rotational;
    throw ConfigError("unknown body force '" + name + "' (none|constant|harmonic|rotational)");
}

Vec3 BodyForce::eval(const Vec3& x, double t) const
{
    switch (kind) {
    case BodyForceKind::none: return Vec3::Zero();
    case BodyForceKind::constant: return h.c;
    case BodyForceKind::harmonic: return h.eval(t);
    case BodyForceKind::rotational: return h.eval(t).cross(x);
    }
    return Vec3::Zero();
}

Vec3 field_value(const ElementQuadrature& eq, const Vector& coef, int q)
{
    Vec3 v = Vec3::Zero();
    for (std::size_t a = 0; a < eq.vfun.size(); ++a) v += eq.nv(q, a) * coef.segment<3>(3 * eq.vfun[a]);
    return v;
}

Tensor3 field_gradient(const ElementQuadrature& eq, const Vector& coef, int q)
{
    Tensor3 g = Tensor3::Zero();
    for (std::size_t a = 0; a < eq.vfun.size(); ++a) g += coef.segment<3>(3 * eq.vfun[a]) * eq.dnv[q].col(a).transpose();
    return g;
}

// ---------------------------------------------------------------------------
// Assembler

struct Assembler::Work {
    Eigen::VectorXd r;
    Eigen::MatrixXd k;
    // scratch
    Eigen::MatrixXd msc, bm, bn1, wmat;
    Eigen::Matrix3Xd acol, ecol;
    Eigen::Matrix3Xd un, vn, u1, v1;
    Eigen::VectorXd pn, p1;
};

Assembler::Assembler(const Discretization& disc, const DofMap& dofs, const OgdenModel& model, const LoadSpec& loads)
    : disc_(disc), dofs_(dofs), model_(model), loads_(loads)
{
    const int nvel3 = 3 * dofs_.n_vel;
    const int n = dofs_.n_free();
    std::vector<Eigen::Triplet<double, int>> trip;
    auto local_index = [&](const ElementQuadrature& eq, int l) {
        const int nd = 3 * static_cast<int>(eq.vfun.size());
        if (l < nd) return dofs_.free_index[3 * eq.vfun[l / 3] + l % 3];
        return dofs_.free_index[nvel3 + eq.pfun[l - nd]];
    };
    for (int e = 0; e < disc_.elements(); ++e) {
        const auto& eq = disc_.element(e);
        const int nd = 3 * static_cast<int>(eq.vfun.size());
        const int nl = nd + static_cast<int>(eq.pfun.size());
        for (int c = 0; c < nl; ++c) {
            const int gc = local_index(eq, c);
            if (gc < 0) continue;
            for (int r = 0; r < nl; ++r) {
                if (r >= nd && c >= nd) continue;
                const int gr = local_index(eq, r);
                if (gr >= 0) trip.emplace_back(gr, gc, 0.0);
            }
        }
    }
    pattern_.resize(n, n);
    pattern_.setFromTriplets(trip.begin(), trip.end());
    pattern_.makeCompressed();
    std::fill(pattern_.valuePtr(), pattern_.valuePtr() + pattern_.nonZeros(), 0.0);

    scatter_.resize(disc_.elements());
    const int* outer = pattern_.outerIndexPtr();
    const int* inner = pattern_.innerIndexPtr();
    for (int e = 0; e < disc_.elements(); ++e) {
        const auto& eq = disc_.element(e);
        const int nd = 3 * static_cast<int>(eq.vfun.size());
        const int nl = nd + static_cast<int>(eq.pfun.size());
        auto& sc = scatter_[e];
        sc.assign(static_cast<std::size_t>(nl) * nl, -1);
        for (int c = 0; c < nl; ++c) {
            const int gc = local_index(eq, c);
            if (gc < 0) continue;
            for (int r = 0; r < nl; ++r) {
                if (r >= nd && c >= nd) continue;
                const int gr = local_index(eq, r);
                if (gr < 0) continue;
                const int* it = std::lower_bound(inner + outer[gc], inner + outer[gc + 1], gr);
                sc[static_cast<std::size_t>(c) * nl + r] = static_cast<int>(it - inner);
            }
        }
    }
}

namespace {

/// Strain-Voigt image of sym(h ⊗ g).
inline void sym_strain(const Eigen::Ref<const Vec3>& h, const Eigen::Ref<const Vec3>& g, double* out)
{
    out[0] = h[0] * g[0];
    out[1] = h[1] * g[1];
    out[2] = h[2] * g[2];
    out[3] = h[0] * g[1] + h[1] * g[0];
    out[4] = h[0] * g[2] + h[2] * g[0];
    out[5] = h[1] * g[2] + h[2] * g[1];
}

}  // namespace

void Assembler::element_kernel(int e, const Eigen::Matrix3Xd& un, const Eigen::Matrix3Xd& vn, const Eigen::VectorXd& pn,
                               const Eigen::Matrix3Xd& u1, const Eigen::Matrix3Xd& v1, const Eigen::VectorXd& p1,
                               double tm, double dt, const AssemblyOptions& opt, bool with_matrix, Work& w) const
{
    const ElementQuadrature& eq = disc_.element(e);
    const int nv = static_cast<int>(eq.vfun.size());
    const int np = static_cast<int>(eq.pfun.size());
    const int nd = 3 * nv;
    const double rho0 = model_.rho0;
    const double gamma = opt.gamma;
    const double c = 0.25 * dt;

    w.r.setZero(nd + np);
    if (with_matrix) {
        w.k.setZero(nd + np, nd + np);
        w.bm.resize(6, nd);
        w.bn1.resize(6, nd);
    }
    Eigen::Map<Eigen::Matrix3Xd> rm(w.r.data(), 3, nv);
    auto rp = w.r.segment(nd, np);

    const Eigen::Matrix3Xd vm = 0.5 * (vn + v1);
    const Eigen::Matrix3Xd vdiff = v1 - vn;
    const Eigen::VectorXd pmid = 0.5 * (pn + p1);

    const int nqp = static_cast<int>(eq.weight.size());
    for (int q = 0; q < nqp; ++q) {
        const Eigen::Matrix3Xd& g = eq.dnv[q];
        const auto nrow = eq.nv.row(q);
        const auto qrow = eq.np.row(q);
        const double wq = eq.weight[q];

        const Tensor3 fn = Tensor3::Identity() + un * g.transpose();
        const Tensor3 f1 = Tensor3::Identity() + u1 * g.transpose();
        const Tensor3 fm = 0.5 * (fn + f1);
        const Tensor3 gvm = vm * g.transpose();
        const Vec3 dv = vdiff * nrow.transpose();
        const double pm = qrow.dot(pmid);

        const double jm = fm.determinant();
        if (!(jm > 0.0)) {
            std::ostringstream os;
            os << "element " << e << " inverted at quadrature point " << q << " (J_m = " << jm << ")";
            throw MeshError(os.str(), e);
        }
        const Tensor3 cof = cofactor(fm);

        StressPair pair;
        pair.c_n = SymTensor3::right_cauchy_green(fn);
        pair.c_np1 = SymTensor3::right_cauchy_green(f1);
        pair.c_m = 0.5 * (pair.c_n + pair.c_np1);
        pair.z = 0.5 * (pair.c_np1 - pair.c_n);
        IchResponse r1, rmid;
        try {
            pair.g_n = g_ich(pair.c_n, model_);
            r1 = evaluate_ich(pair.c_np1, model_, false, opt.elasticity);
            rmid = evaluate_ich(pair.c_m, model_, with_matrix, opt.elasticity);
        } catch (const NumericalError& err) {
            throw MeshError("element " + std::to_string(e) + ": " + err.what(), e);
        }
        pair.g_np1 = r1.energy;
        pair.s_m = rmid.stress;
        const AlgStressResult alg = algorithmic_stress(pair, opt.formula, opt.tol_b);
        const Tensor3 s = alg.s_alg.to_matrix();

        const double d = gvm.cwiseProduct(cof).sum();
        const Tensor3 p1stress = fm * s + (gamma * d / jm - pm) * cof;
        const Vec3 body = loads_.body.eval(eq.point[q], tm);

        rm.noalias() += (wq * rho0) * (dv / dt - body) * nrow;
        rm.noalias() += wq * p1stress * g;
        rp.noalias() += (wq * d) * qrow.transpose();

        if (!with_matrix) continue;

        // Velocity-velocity block; δF_m = c δV ⊗ ∇N, δF_{n+1} = 2c δV ⊗ ∇N.
        w.acol.noalias() = cof * g;
        w.msc.noalias() = (rho0 / dt) * nrow.transpose() * nrow;
        w.msc.noalias() += c * g.transpose() * (s * g);
        for (int b = 0; b < nv; ++b) {
            for (int a = 0; a < nv; ++a) {
                const double v = wq * w.msc(a, b);
                for (int i = 0; i < 3; ++i) w.k(3 * a + i, 3 * b + i) += v;
            }
        }
        for (int a = 0; a < nv; ++a) {
            const Vec3 ga = g.col(a);
            for (int i = 0; i < 3; ++i) {
                sym_strain(fm.row(i).transpose(), ga, &w.bm(0, 3 * a + i));
                sym_strain(f1.row(i).transpose(), ga, &w.bn1(0, 3 * a + i));
            }
        }
        const Mat6 t = algorithmic_tangent(pair, alg, rmid.tangent, r1.stress);
        w.wmat.noalias() = (4.0 * c * wq) * t * w.bn1;
        w.k.topLeftCorner(nd, nd).noalias() += w.bm.transpose() * w.wmat;

        // Pressure and grad-div through δ cof.
        const double kap = wq * (gamma * d / jm - pm) * c / jm;
        if (kap != 0.0) {
            for (int b = 0; b < nv; ++b) {
                const Vec3 ab = w.acol.col(b);
                for (int a = 0; a < nv; ++a) {
                    const Vec3 aa = w.acol.col(a);
                    w.k.block<3, 3>(3 * a, 3 * b).noalias() += kap * (aa * ab.transpose() - ab * aa.transpose());
                }
            }
        }
        // δd = ½ a_B + (c/J)(d a_B − Tmᵀ a_B), Tm = ∇V_m cofᵀ.
        const Tensor3 tm_t = (gvm * cof.transpose()).transpose();
        if (gamma != 0.0) {
            w.ecol.noalias() = (0.5 / jm) * w.acol - (c / (jm * jm)) * (tm_t * w.acol);
            const Eigen::Map<const Eigen::VectorXd> av(w.acol.data(), nd);
            const Eigen::Map<const Eigen::VectorXd> ev(w.ecol.data(), nd);
            w.k.topLeftCorner(nd, nd).noalias() += (wq * gamma) * av * ev.transpose();
        }
        w.ecol.noalias() = (0.5 + c * d / jm) * w.acol - (c / jm) * (tm_t * w.acol);
        const Eigen::Map<const Eigen::VectorXd> av(w.acol.data(), nd);
        const Eigen::Map<const Eigen::VectorXd> dd(w.ecol.data(), nd);
        w.k.topRightCorner(nd, np).noalias() += (-0.5 * wq) * av * qrow;
        w.k.bottomLeftCorner(np, nd).noalias() += wq * qrow.transpose() * dd.transpose();
    }
}

void Assembler::element(int e, const State& n, const State& np1, double dt, const AssemblyOptions& opt,
                        bool with_matrix, Work& w) const
{
    const ElementQuadrature& eq = disc_.element(e);
    const int nv = static_cast<int>(eq.vfun.size());
    const int np = static_cast<int>(eq.pfun.size());
    w.un.resize(3, nv);
    w.vn.resize(3, nv);
    w.u1.resize(3, nv);
    w.v1.resize(3, nv);
    for (int a = 0; a < nv; ++a) {
        const int g = 3 * eq.vfun[a];
        w.un.col(a) = n.U.segment<3>(g);
        w.vn.col(a) = n.V.segment<3>(g);
        w.u1.col(a) = np1.U.segment<3>(g);
        w.v1.col(a) = np1.V.segment<3>(g);
    }
    w.pn.resize(np);
    w.p1.resize(np);
    for (int b = 0; b < np; ++b) {
        w.pn[b] = n.P[eq.pfun[b]];
        w.p1[b] = np1.P[eq.pfun[b]];
    }
    const double tm = 0.5 * (n.t + np1.t);

    if (!with_matrix || opt.tangent == TangentMode::analytic) {
        element_kernel(e, w.un, w.vn, w.pn, w.u1, w.v1, w.p1, tm, dt, opt, with_matrix, w);
        return;
    }

    // Central differences of the element residual, U_{n+1} slaved to V_{n+1}.
    const int nd = 3 * nv;
    const int nl = nd + np;
    Work tmp;
    element_kernel(e, w.un, w.vn, w.pn, w.u1, w.v1, w.p1, tm, dt, opt, false, tmp);
    const Eigen::VectorXd r0 = tmp.r;
    Eigen::MatrixXd k(nl, nl);
    k.setZero();
    const double scale = std::max({1.0, w.v1.cwiseAbs().maxCoeff(), w.p1.size() ? w.p1.cwiseAbs().maxCoeff() : 0.0});
    for (int l = 0; l < nl; ++l) {
        Eigen::VectorXd col(nl);
        const double h = 1e-6 * scale;
        for (int sgn = -1; sgn <= 1; sgn += 2) {
            Eigen::Matrix3Xd u1 = w.u1, v1 = w.v1;
            Eigen::VectorXd p1 = w.p1;
            if (l < nd) {
                v1(l % 3, l / 3) += sgn * h;
                u1(l % 3, l / 3) += sgn * 0.5 * dt * h;
            } else {
                p1[l - nd] += sgn * h;
            }
            element_kernel(e, w.un, w.vn, w.pn, u1, v1, p1, tm, dt, opt, false, tmp);
            if (sgn < 0) col = tmp.r;
            else k.col(l) = (tmp.r - col) / (2.0 * h);
        }
    }
    k.bottomRightCorner(np, np).setZero();
    w.r = r0;
    w.k = std::move(k);
}

void Assembler::add_tractions(const State& n, const State& np1, double /*dt*/, Residual& r) const
{
    const double tm = 0.5 * (n.t + np1.t);
    for (const Traction& tr : loads_.tractions) {
        const Vec3 h = tr.h.eval(tm);
        if (h.isZero(0.0)) continue;
        for (const FaceQuadrature& fq : disc_.face(tr.face)) {
            for (std::size_t q = 0; q < fq.weight.size(); ++q) {
                for (std::size_t a = 0; a < fq.vfun.size(); ++a) {
                    r.m.segment<3>(3 * fq.vfun[a]) -= (fq.weight[q] * fq.nv(q, a)) * h;
                }
            }
        }
    }
}

void Assembler::run(const State& n, const State& np1, double dt, const AssemblyOptions& opt, Residual& r,
                    SparseMatrix* k) const
{
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    r.m.setZero(3 * dofs_.n_vel);
    r.p.setZero(dofs_.n_pres);
    if (k) {
        if (k->rows() != pattern_.rows() || k->nonZeros() != pattern_.nonZeros()) *k = pattern_;
        std::fill(k->valuePtr(), k->valuePtr() + k->nonZeros(), 0.0);
    }
    const bool with_matrix = k != nullptr;
    const int ne = disc_.elements();

    auto scatter = [&](int e, const Work& w) {
        const ElementQuadrature& eq = disc_.element(e);
        const int nv = static_cast<int>(eq.vfun.size());
        const int np = static_cast<int>(eq.pfun.size());
        for (int a = 0; a < nv; ++a) r.m.segment<3>(3 * eq.vfun[a]) += w.r.segment<3>(3 * a);
        for (int b = 0; b < np; ++b) r.p[eq.pfun[b]] += w.r[3 * nv + b];
        if (!with_matrix) return;
        double* val = k->valuePtr();
        const auto& sc = scatter_[e];
        const double* kd = w.k.data();
        for (std::size_t i = 0; i < sc.size(); ++i) {
            if (sc[i] >= 0) val[sc[i]] += kd[i];
        }
    };

    const bool parallel = opt.parallel && omp_get_max_threads() > 1 && ne > 1;
    if (!parallel) {
        Work w;
        for (int e = 0; e < ne; ++e) {
            element(e, n, np1, dt, opt, with_matrix, w);
            scatter(e, w);
        }
    } else {
        // Element buffers are filled concurrently and merged in element order.
        std::vector<Work> works(ne);
        std::vector<std::exception_ptr> errors(ne);
#pragma omp parallel for schedule(dynamic, 1)
        for (int e = 0; e < ne; ++e) {
            try {
                element(e, n, np1, dt, opt, with_matrix, works[e]);
            } catch (...) {
                errors[e] = std::current_exception();
            }
        }
        for (int e = 0; e < ne; ++e) {
            if (errors[e]) std::rethrow_exception(errors[e]);
        }
        for (int e = 0; e < ne; ++e) scatter(e, works[e]);
    }
    add_tractions(n, np1, dt, r);
}

Residual Assembler::residual(const State& n, const State& np1, double dt, const AssemblyOptions& opt) const
{
    Residual r;
    run(n, np1, dt, opt, r, nullptr);
    return r;
}

void Assembler::system(const State& n, const State& np1, double dt, const AssemblyOptions& opt, Residual& r,
                       SparseMatrix& k) const
{
    run(n, np1, dt, opt, r, &k);
}

Vector Assembler::free_residual(const Residual& r) const
{
    Vector out(dofs_.n_free());
    const int nvel3 = 3 * dofs_.n_vel;
    for (int i = 0; i < nvel3; ++i) {
        if (dofs_.free_index[i] >= 0) out[dofs_.free_index[i]] = r.m[i];
    }
    for (int b = 0; b < dofs_.n_pres; ++b) out[dofs_.free_index[nvel3 + b]] = r.p[b];
    return out;
}

// ---------------------------------------------------------------------------

Vector residual_kinematic(const State& n, const State& np1, double dt)
{
    return (np1.U - n.U) / dt - 0.5 * (n.V + np1.V);
}

Vector residual_mass(const Assembler& a, const State& n, const State& np1)
{
    // The mass residual does not depend on the step size.
    AssemblyOptions opt;
    opt.formula = StressFormula::midpoint;
    return a.residual(n, np1, 1.0, opt).p;
}

Vector residual_momentum(const Assembler& a, const State& n, const State& np1, double dt, const AssemblyOptions& opt)
{
    return a.residual(n, np1, dt, opt).m;
}

TangentBlocks tangent_blocks(const Assembler& a, const State& n, const State& np1, double dt,
                             const AssemblyOptions& opt)
{
    Residual r;
    SparseMatrix k;
    a.system(n, np1, dt, opt, r, k);
    const int nv = a.dofs().n_free_vel;
    const int np = a.dofs().n_pres;
    TangentBlocks b;
    b.A = k.topLeftCorner(nv, nv);
    b.B = k.topRightCorner(nv, np);
    b.C = k.bottomLeftCorner(np, nv);
    return b;
}

}  // namespace incel
