#include "incel/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "incel/error.hpp"

namespace incel {

// ---------------------------------------------------------------------------
// Sweeps

void SweepSpec::validate() const
{
    if (samples < 2) throw ConfigError("sweep needs at least 2 samples");
    if (!(xi_min > 0.0) || !(xi_max > xi_min)) throw ConfigError("sweep needs 0 < xi_min < xi_max");
    if (!(det(f1) > 0.0)) throw ConfigError("sweep F1 must have positive determinant");
    if (!(tol_b >= 0.0)) throw ConfigError("tol_b must be non-negative");
    model.validate();
}

namespace {

SweepRow sweep_row(const SweepSpec& s, double xi)
{
    SweepRow row;
    row.xi = xi;
    const Tensor3 f2 = s.f1 + xi * s.d;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(det(f2) > 0.0)) {
        row.valid = false;
        row.dc_norm = row.s_enh_norm = row.denominator = row.numerator = row.normalized_denominator = nan;
        return row;
    }
    const SymTensor3 c1 = SymTensor3::right_cauchy_green(s.f1);
    const SymTensor3 c2 = SymTensor3::right_cauchy_green(f2);
    const StressPair p = StressPair::make(c1, c2, s.model);
    const AlgStressResult r = algorithmic_stress(p, s.formula, s.tol_b);
    row.dc_norm = norm(c2 - c1);
    row.s_enh_norm = norm(r.enhancement(p));
    row.numerator = r.numerator;
    switch (s.formula) {
    case StressFormula::gonzalez:
        row.denominator = ddot(p.z, p.z);
        row.normalized_denominator = 1.0;
        break;
    case StressFormula::scaled:
        row.denominator = ddot(p.s_m, p.z);
        row.normalized_denominator = std::abs(row.denominator) / (norm(p.s_m) * norm(p.z));
        break;
    case StressFormula::coaxial:
        row.denominator = ddot(p.c_m, p.z);
        row.normalized_denominator = std::abs(row.denominator) / (norm(p.c_m) * norm(p.z));
        break;
    case StressFormula::midpoint:
        row.denominator = 0.0;
        row.normalized_denominator = 0.0;
        break;
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool parallel)
{
    spec.validate();
    const int n = spec.samples;
    std::vector<SweepRow> rows(n);
    const double lmin = std::log(spec.xi_min), lmax = std::log(spec.xi_max);
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < n; ++k) {
        const double xi = k == 0 ? spec.xi_min : k == n - 1 ? spec.xi_max : std::exp(lmin + (lmax - lmin) * k / (n - 1));
        rows[k] = sweep_row(spec, xi);
    }
    if (!spec.refine_sign_changes) return rows;

    std::vector<SweepRow> extra;
    for (int k = 0; k + 1 < n; ++k) {
        const SweepRow& a = rows[k];
        const SweepRow& b = rows[k + 1];
        if (!a.valid || !b.valid || a.denominator == 0.0 || b.denominator == 0.0) continue;
        if ((a.denominator > 0.0) == (b.denominator > 0.0)) continue;
        double lo = a.xi, hi = b.xi;
        const bool lo_pos = a.denominator > 0.0;
        SweepRow best = std::abs(a.denominator) < std::abs(b.denominator) ? a : b;
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const SweepRow r = sweep_row(spec, mid);
            if (!r.valid) break;
            if (std::abs(r.denominator) < std::abs(best.denominator)) best = r;
            if (r.denominator == 0.0) break;
            if ((r.denominator > 0.0) == lo_pos) lo = mid;
            else hi = mid;
        }
        best.refined = true;
        extra.push_back(best);
    }
    rows.insert(rows.end(), extra.begin(), extra.end());
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) { return x.xi < y.xi; });
    return rows;
}

std::vector<SweepSpec> builtin_sweeps()
{
    std::vector<SweepSpec> out;
    Tensor3 f1;
    f1 << 1.5, 0.0, 0.0, 0.1, 0.8, 0.0, 0.0, 0.0, 1.0;
    Tensor3 dcomp, dshear, dmix;
    dcomp << 0, 0, 0, 0, -1, 0, 0, 0, 1;
    dshear << 0, 1, 0, 0, 0, 0, 0, 0, 1;
    dmix << 0, 1, 0, 0, -1, 0, 0, 0, 1;
    const OgdenModel nh = OgdenModel::neo_hookean(5000.0, 1.0);
    for (auto [name, d] : {std::pair{"comp", dcomp}, std::pair{"shear", dshear}, std::pair{"mix", dmix}}) {
        SweepSpec s;
        s.name = name;
        s.f1 = f1;
        s.d = d;
        s.model = nh;
        s.formula = StressFormula::gonzalez;
        out.push_back(s);
    }
    SweepSpec sc;
    sc.name = "scaled_pair";
    sc.f1 << 0.996, 0.001, 0.185, 0.0, 1.0, 0.002, -0.069, 0.0, 1.008;
    sc.d << -20, 0, 170, -10, -20, 10, -180, 0, 20;
    sc.model = nh;
    sc.formula = StressFormula::scaled;
    sc.refine_sign_changes = true;
    out.push_back(sc);
    SweepSpec co;
    co.name = "coaxial_pair";
    co.f1 << 0.985, 0.0, 0.15, 0.0, 1.0, 0.0, -0.032, 0.0, 1.003;
    co.d << 60, 0, 170, 0, 10, 0, -100, 0, 10;
    co.model = nh;
    co.formula = StressFormula::coaxial;
    co.refine_sign_changes = true;
    out.push_back(co);
    return out;
}

SweepSpec builtin_sweep(const std::string& name)
{
    for (const auto& s : builtin_sweeps()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown sweep '" + name + "' (comp|shear|mix|scaled_pair|coaxial_pair)");
}

// ---------------------------------------------------------------------------
// Scenarios

const char* to_string(InitialVelocityKind k)
{
    switch (k) {
    case InitialVelocityKind::rest: return "rest";
    case InitialVelocityKind::uniform: return "uniform";
    case InitialVelocityKind::twist: return "twist";
    }
    return "?";
}

InitialVelocityKind parse_initial_velocity(const std::string& name)
{
    if (name == "rest") return InitialVelocityKind::rest;
    if (name == "uniform") return InitialVelocityKind::uniform;
    if (name == "twist") return InitialVelocityKind::twist;
    throw ConfigError("unknown initial velocity '" + name + "' (rest|uniform|twist)");
}

Vec3 InitialVelocity::eval(const Vec3& x) const
{
    switch (kind) {
    case InitialVelocityKind::rest: return Vec3::Zero();
    case InitialVelocityKind::uniform: return v0;
    case InitialVelocityKind::twist: {
        const double w = omega1 * std::sin(std::numbers::pi * (x[2] - 0.5 * length) / (2.0 * length)) + omega2;
        return Vec3(0.0, 0.0, w).cross(x);
    }
    }
    return Vec3::Zero();
}

std::string ScenarioSpec::validate() const
{
    if (name.empty()) throw ConfigError("scenario name is empty");
    for (int d = 0; d < 3; ++d) {
        if (elements[d] < 1) throw ConfigError("element counts must be at least 1");
        if (patch_file.empty() && !(box_hi[d] > box_lo[d])) throw ConfigError("box_hi must exceed box_lo");
    }
    if (p < 1 || a < 1 || b < 0 || b >= a) throw ConfigError("need p >= 1, a >= 1, 0 <= b < a");
    if (quad_points < 0) throw ConfigError("quad_points must be non-negative");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    for (const auto& f : clamped) {
        if (f.dir < 0 || f.dir > 2 || f.side < 0 || f.side > 1) throw ConfigError("clamped face does not exist");
    }
    for (const auto& t : loads.tractions) {
        if (t.face.dir < 0 || t.face.dir > 2 || t.face.side < 0 || t.face.side > 1) {
            throw ConfigError("traction face does not exist");
        }
        for (const auto& f : clamped) {
            if (f == t.face) throw ConfigError("face " + to_string(f) + " is both clamped and loaded");
        }
    }
    if (initial.kind == InitialVelocityKind::twist && !(initial.length > 0.0)) {
        throw ConfigError("twist length must be positive");
    }
    return model.validate();
}

namespace {

bool same_harmonic(const Harmonic& x, const Harmonic& y)
{
    return x.c == y.c && x.a == y.a && x.b == y.b && x.omega == y.omega;
}

}  // namespace

bool operator==(const ScenarioSpec& x, const ScenarioSpec& y)
{
    if (x.model.terms.size() != y.model.terms.size()) return false;
    for (std::size_t k = 0; k < x.model.terms.size(); ++k) {
        if (x.model.terms[k].mu != y.model.terms[k].mu || x.model.terms[k].alpha != y.model.terms[k].alpha) return false;
    }
    if (x.loads.tractions.size() != y.loads.tractions.size()) return false;
    for (std::size_t k = 0; k < x.loads.tractions.size(); ++k) {
        if (!(x.loads.tractions[k].face == y.loads.tractions[k].face) ||
            !same_harmonic(x.loads.tractions[k].h, y.loads.tractions[k].h)) {
            return false;
        }
    }
    return x.name == y.name && x.patch_file == y.patch_file && x.box_lo == y.box_lo && x.box_hi == y.box_hi &&
           x.elements == y.elements && x.p == y.p && x.a == y.a && x.b == y.b && x.quad_points == y.quad_points &&
           x.model.rho0 == y.model.rho0 && x.initial.kind == y.initial.kind && x.initial.v0 == y.initial.v0 &&
           x.initial.omega1 == y.initial.omega1 && x.initial.omega2 == y.initial.omega2 &&
           x.initial.length == y.initial.length && x.loads.body.kind == y.loads.body.kind &&
           same_harmonic(x.loads.body.h, y.loads.body.h) && x.clamped == y.clamped && x.dt == y.dt &&
           x.t_final == y.t_final && x.gamma == y.gamma && x.formula == y.formula && x.has_monitor == y.has_monitor &&
           x.monitor == y.monitor;
}

ScenarioSpec scenario_twisting_column()
{
    ScenarioSpec s;
    s.name = "twisting_column";
    // In-plane size is not printed with the problem data; unit square assumed.
    s.box_lo = Vec3(-0.5, -0.5, 0.0);
    s.box_hi = Vec3(0.5, 0.5, 6.0);
    s.elements = {3, 3, 11};
    s.p = 1;
    s.a = 1;
    s.b = 0;
    s.model = OgdenModel{{{6.3e5, 1.3}, {1.2e3, 5.0}, {-1.0e4, -2.0}}, 1.0e3};
    s.initial.kind = InitialVelocityKind::twist;
    s.initial.omega1 = 20.0;
    s.initial.omega2 = 5.0;
    s.initial.length = 6.0;
    s.dt = 0.01;
    s.t_final = 5.0;
    return s;
}

ScenarioSpec scenario_cantilever()
{
    ScenarioSpec s;
    s.name = "cantilever";
    // Cross-section inferred from point A on the face X₂ = 0.005.
    s.box_lo = Vec3(-0.005, -0.005, 0.0);
    s.box_hi = Vec3(0.005, 0.005, 0.3);
    s.elements = {2, 2, 21};
    s.p = 1;
    s.a = 1;
    s.b = 0;
    s.model = OgdenModel::neo_hookean(6.93e7, 3.0e3);
    s.initial.kind = InitialVelocityKind::rest;
    s.clamped = {FaceId{2, 0}};
    Traction t;
    t.face = FaceId{2, 1};
    t.h.a = Vec3(200.0, 0.0, 0.0);
    t.h.b = Vec3(0.0, 100.0, 0.0);
    t.h.omega = 8.0;
    s.loads.tractions.push_back(t);
    s.dt = 0.01;
    s.t_final = 250.0;
    s.has_monitor = true;
    s.monitor = Vec3(0.0, 0.005, 0.3);
    return s;
}

std::vector<std::string> scenario_names() { return {"twisting_column", "cantilever"}; }

ScenarioSpec scenario_by_name(const std::string& name)
{
    if (name == "twisting_column") return scenario_twisting_column();
    if (name == "cantilever") return scenario_cantilever();
    throw ConfigError("unknown scenario '" + name + "' (twisting_column|cantilever)");
}

Vec3 invert_geometry(const Geometry& g, const Vec3& x)
{
    Vec3 u(0.5, 0.5, 0.5);
    const auto [lo, hi] = g.bounds();
    const double scale = std::max(1.0, (hi - lo).norm());
    for (int it = 0; it < 60; ++it) {
        Tensor3 jac;
        const Vec3 r = g.map(u, &jac) - x;
        if (r.norm() <= 1e-14 * scale) break;
        u -= jac.inverse() * r;
        u = u.cwiseMax(0.0).cwiseMin(1.0);
    }
    if ((g.map(u) - x).norm() > 1e-10 * scale) {
        std::ostringstream os;
        os << "point (" << x.transpose() << ") is not inside the patch";
        throw MeshError(os.str());
    }
    return u;
}

namespace {

Geometry scenario_geometry(const ScenarioSpec& s)
{
    if (!s.patch_file.empty()) return read_patch_file(s.patch_file);
    return Geometry::box(s.box_lo, s.box_hi);
}

}  // namespace

ScenarioInstance::ScenarioInstance(const ScenarioSpec& spec)
    : spec_(spec),
      disc_((spec.validate(), scenario_geometry(spec)), build_mixed_spaces(spec.p, spec.a, spec.b, spec.elements),
            spec.quad_points),
      dofs_(DofMap::build(disc_, spec.clamped))
{
    asmb_ = std::make_unique<Assembler>(disc_, dofs_, spec_.model, spec_.loads);
    if (spec_.has_monitor) monitor_u_ = invert_geometry(disc_.geometry(), spec_.monitor);
}

State ScenarioInstance::initial_state() const
{
    State s = State::zero(disc_);
    if (spec_.initial.kind != InitialVelocityKind::rest) {
        const InitialVelocity iv = spec_.initial;
        s.V = project_velocity(disc_, dofs_, [&](const Vec3& x) { return iv.eval(x); });
    }
    return s;
}

SolverConfig ScenarioInstance::solver_config() const
{
    SolverConfig c;
    c.dt = spec_.dt;
    c.t_final = spec_.t_final;
    c.gamma = spec_.gamma;
    c.formula = spec_.formula;
    return c;
}

Vec3 ScenarioInstance::evaluate(const Vector& coef, const Vec3& u) const
{
    const BasisValues bv = disc_.spaces().velocity.eval(u);
    Vec3 out = Vec3::Zero();
    for (std::size_t k = 0; k < bv.index.size(); ++k) out += bv.value[k] * coef.segment<3>(3 * bv.index[k]);
    return out;
}

}  // namespace incel
