#include "incel/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "incel/error.hpp"

namespace incel {

OgdenModel OgdenModel::neo_hookean(double mu, double rho0)
{
    return OgdenModel{{{mu, 2.0}}, rho0};
}

double OgdenModel::shear_modulus() const
{
    double g = 0.0;
    for (const auto& t : terms) g += 0.5 * t.mu * t.alpha;
    return g;
}

std::string OgdenModel::validate() const
{
    if (terms.empty()) throw ConfigError("Ogden model needs at least one (mu, alpha) term");
    for (std::size_t p = 0; p < terms.size(); ++p) {
        const auto& t = terms[p];
        if (!std::isfinite(t.mu) || !std::isfinite(t.alpha)) {
            throw ConfigError("Ogden term " + std::to_string(p) + " is not finite");
        }
        if (t.alpha == 0.0) throw ConfigError("Ogden term " + std::to_string(p) + " has alpha = 0");
    }
    if (!(rho0 > 0.0) || !std::isfinite(rho0)) throw ConfigError("rho0 must be positive");
    if (!(shear_modulus() > 0.0)) {
        std::ostringstream os;
        os << "ground-state shear modulus " << shear_modulus() << " is not positive";
        return os.str();
    }
    return {};
}

StretchState stretch_state(const SymTensor3& c)
{
    const SpectralDecomp d = sym_eigen(c);
    for (int a = 0; a < 3; ++a) {
        if (!(d.values[a] > 1e-14)) {
            std::ostringstream os;
            os << "C is not positive definite: eigenvalue " << a << " = " << d.values[a];
            throw NumericalError(os.str());
        }
    }
    StretchState s;
    double mean_log = 0.0;
    std::array<double, 3> log_l{};
    for (int a = 0; a < 3; ++a) {
        s.lambda_sq[a] = d.values[a];
        s.lambda[a] = std::sqrt(d.values[a]);
        log_l[a] = 0.5 * std::log(d.values[a]);
        mean_log += log_l[a] / 3.0;
    }
    s.J = s.lambda[0] * s.lambda[1] * s.lambda[2];
    for (int a = 0; a < 3; ++a) {
        s.log_mod[a] = log_l[a] - mean_log;
    }
    // Remove the residual of Σ log λ̃ so the product is 1 to round-off.
    const double drift = (s.log_mod[0] + s.log_mod[1] + s.log_mod[2]) / 3.0;
    for (int a = 0; a < 3; ++a) {
        s.log_mod[a] -= drift;
        s.mod[a] = std::exp(s.log_mod[a]);
    }
    s.vectors = d.vectors;
    s.multiplicity = d.multiplicity;
    s.coincidence_tolerance = d.coincidence_tolerance;
    return s;
}

double g_ich(const std::array<double, 3>& mod_stretch, const OgdenModel& m)
{
    double g = 0.0;
    for (const auto& t : m.terms) {
        double acc = 0.0;
        for (double l : mod_stretch) acc += std::expm1(t.alpha * std::log(l));
        g += t.mu / t.alpha * acc;
    }
    return g;
}

double g_ich(const StretchState& s, const OgdenModel& m)
{
    double g = 0.0;
    for (const auto& t : m.terms) {
        double acc = 0.0;
        for (double l : s.log_mod) acc += std::expm1(t.alpha * l);
        g += t.mu / t.alpha * acc;
    }
    return g;
}

double g_ich(const SymTensor3& c, const OgdenModel& m) { return g_ich(stretch_state(c), m); }

SymTensor3 s_vol(const SymTensor3& c, double pressure)
{
    if (pressure == 0.0) return SymTensor3::zero();
    return (-std::sqrt(det(c)) * pressure) * inverse(c);
}

const char* to_string(ElasticityVariant v)
{
    return v == ElasticityVariant::corrected ? "corrected" : "conventional";
}

namespace {

/// Relative gap below which two squared stretches are treated as coincident.
constexpr double kCoincidence = 1e-12;

Voigt6 sym_outer(const Vec3& a, const Vec3& b)
{
    Voigt6 v;
    v << a[0] * b[0], a[1] * b[1], a[2] * b[2], 0.5 * (a[0] * b[1] + a[1] * b[0]), 0.5 * (a[0] * b[2] + a[2] * b[0]),
        0.5 * (a[1] * b[2] + a[2] * b[1]);
    return v;
}

/// Principal components of the stress and of the elasticity tensor.
struct Spectral {
    double energy = 0.0;
    std::array<double, 3> stress{};
    double m[3][3]{};
    double q[3][3]{};
};

Spectral spectral_response(const StretchState& s, const OgdenModel& m, bool with_tangent, ElasticityVariant variant)
{
    Spectral r;
    const auto& x = s.lambda_sq;
    const auto& l = s.log_mod;
    double s2[3] = {0.0, 0.0, 0.0};
    for (const auto& t : m.terms) {
        double e[3];
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
            e[a] = std::exp(t.alpha * l[a]);
            acc += std::expm1(t.alpha * l[a]);
        }
        r.energy += t.mu / t.alpha * acc;
        // λ̃_a^α − ⅓Σ_c λ̃_c^α, written as a sum of differences so that it
        // vanishes exactly when the stretches coincide.
        for (int a = 0; a < 3; ++a) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) {
                if (c != a) d += e[c] * std::expm1(t.alpha * (l[a] - l[c]));
            }
            s2[a] += t.mu * d / 3.0;
        }
        if (!with_tangent) continue;
        const double sum = e[0] + e[1] + e[2];
        const double ma = t.mu * t.alpha;
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                if (a == b) {
                    const double k1 = variant == ElasticityVariant::corrected ? 1.0 / 3.0 - 2.0 / t.alpha : 1.0 / 3.0;
                    const double k2 = variant == ElasticityVariant::corrected ? 1.0 / 9.0 + 2.0 / (3.0 * t.alpha) : 1.0 / 9.0;
                    r.m[a][a] += ma * (k1 * e[a] + k2 * sum) / (x[a] * x[a]);
                } else {
                    r.m[a][b] += ma * (-e[a] / 3.0 - e[b] / 3.0 + sum / 9.0) / (x[a] * x[b]);
                }
            }
        }
        // (S_b − S_a)/(λ_b² − λ_a²) as a divided difference of λ̃^α/λ² and of
        // 1/λ², free of cancellation for nearby stretches.
        for (int a = 0; a < 3; ++a) {
            for (int b = a + 1; b < 3; ++b) {
                const double delta = x[b] - x[a];
                if (delta == 0.0) continue;
                const double beta = 0.5 * t.alpha - 1.0;
                const double dd = e[a] / x[a] * std::expm1(beta * std::log1p(delta / x[a])) / delta;
                r.q[a][b] += t.mu * (dd + sum / (3.0 * x[a] * x[b]));
            }
        }
    }
    for (int a = 0; a < 3; ++a) r.stress[a] = s2[a] / x[a];
    if (!with_tangent) return r;

    // Coincident pairs use the limit ½(M_bb − M_ab) of the corrected coefficients.
    const double xmax = std::max({x[0], x[1], x[2]});
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            if (std::abs(x[b] - x[a]) > kCoincidence * xmax) continue;
            double lim = 0.0;
            for (const auto& t : m.terms) {
                double e[3];
                for (int c = 0; c < 3; ++c) e[c] = std::exp(t.alpha * l[c]);
                const double sum = e[0] + e[1] + e[2];
                const double ma = t.mu * t.alpha;
                const double mbb = ma * ((1.0 / 3.0 - 2.0 / t.alpha) * e[b] + (1.0 / 9.0 + 2.0 / (3.0 * t.alpha)) * sum);
                const double mab = ma * (-e[a] / 3.0 - e[b] / 3.0 + sum / 9.0);
                lim += 0.5 * (mbb - mab);
            }
            r.q[a][b] = lim / (x[a] * x[b]);
        }
    }
    return r;
}

SymTensor3 assemble_stress(const StretchState& s, const std::array<double, 3>& sa)
{
    SymTensor3 out;
    for (int a = 0; a < 3; ++a) out += sa[a] * SymTensor3::outer(s.vectors[a]);
    return out;
}

Mat6 assemble_tangent(const StretchState& s, const Spectral& r)
{
    std::array<Voigt6, 3> n;
    for (int a = 0; a < 3; ++a) n[a] = SymTensor3::outer(s.vectors[a]).stress_voigt();
    Mat6 c = Mat6::Zero();
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) c.noalias() += r.m[a][b] * n[a] * n[b].transpose();
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const Voigt6 p = sym_outer(s.vectors[a], s.vectors[b]);
            c.noalias() += 4.0 * r.q[a][b] * p * p.transpose();
        }
    }
    // Exact major symmetry.
    return 0.5 * (c + c.transpose());
}

}  // namespace

SymTensor3 s_ich(const SymTensor3& c, const OgdenModel& m)
{
    const StretchState s = stretch_state(c);
    return assemble_stress(s, spectral_response(s, m, false, ElasticityVariant::corrected).stress);
}

Mat6 c_ich(const SymTensor3& c, const OgdenModel& m)
{
    const StretchState s = stretch_state(c);
    return assemble_tangent(s, spectral_response(s, m, true, ElasticityVariant::corrected));
}

Mat6 c_ich_conventional(const SymTensor3& c, const OgdenModel& m)
{
    const StretchState s = stretch_state(c);
    return assemble_tangent(s, spectral_response(s, m, true, ElasticityVariant::conventional));
}

IchResponse evaluate_ich(const SymTensor3& c, const OgdenModel& m, bool with_tangent, ElasticityVariant variant)
{
    const StretchState s = stretch_state(c);
    const Spectral r = spectral_response(s, m, with_tangent, variant);
    IchResponse out;
    out.energy = r.energy;
    out.stress = assemble_stress(s, r.stress);
    if (with_tangent) out.tangent = assemble_tangent(s, r);
    return out;
}

}  // namespace incel
