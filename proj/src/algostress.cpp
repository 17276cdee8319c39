#include "incel/algostress.hpp"

#include <cmath>
#include <string>

#include "incel/error.hpp"

namespace incel {

namespace {

// A:B accumulated in extended precision; the denominators can be small
// differences of large products.
double ddot_ext(const SymTensor3& a, const SymTensor3& b)
{
    long double s = 0.0L;
    for (int k = 0; k < 6; ++k) s += (k < 3 ? 1.0L : 2.0L) * static_cast<long double>(a[k]) * b[k];
    return static_cast<double>(s);
}

}  // namespace

const char* to_string(StressFormula f)
{
    switch (f) {
    case StressFormula::gonzalez: return "gonzalez";
    case StressFormula::scaled: return "scaled";
    case StressFormula::coaxial: return "coaxial";
    case StressFormula::midpoint: return "midpoint";
    }
    return "?";
}

StressFormula parse_formula(std::string_view name)
{
    if (name == "gonzalez") return StressFormula::gonzalez;
    if (name == "scaled") return StressFormula::scaled;
    if (name == "coaxial") return StressFormula::coaxial;
    if (name == "midpoint") return StressFormula::midpoint;
    throw ConfigError("unknown stress formula '" + std::string(name) + "' (gonzalez|scaled|coaxial|midpoint)");
}

StressPair StressPair::make(const SymTensor3& c_n, const SymTensor3& c_np1, const OgdenModel& m)
{
    StressPair p;
    p.c_n = c_n;
    p.c_np1 = c_np1;
    p.c_m = 0.5 * (c_n + c_np1);
    p.z = 0.5 * (c_np1 - c_n);
    p.g_n = g_ich(c_n, m);
    p.g_np1 = g_ich(c_np1, m);
    p.s_m = s_ich(p.c_m, m);
    return p;
}

AlgStressResult midpoint_only(const StressPair& p)
{
    AlgStressResult r;
    r.s_alg = p.s_m;
    r.numerator = p.delta_g() - ddot_ext(p.s_m, p.z);
    r.formula = StressFormula::midpoint;
    return r;
}

AlgStressResult gonzalez(const StressPair& p, double tol_b)
{
    AlgStressResult r = midpoint_only(p);
    r.formula = StressFormula::gonzalez;
    r.denominator = ddot_ext(p.z, p.z);
    if (r.denominator > tol_b) {
        r.enhancement_active = true;
        r.factor = r.numerator / r.denominator;
        r.s_alg = p.s_m + r.factor * p.z;
    }
    return r;
}

AlgStressResult scaled_midpoint(const StressPair& p, double tol_b)
{
    AlgStressResult r = midpoint_only(p);
    r.formula = StressFormula::scaled;
    r.denominator = ddot_ext(p.s_m, p.z);
    if (std::abs(r.denominator) > tol_b) {
        r.enhancement_active = true;
        r.factor = p.delta_g() / r.denominator;
        r.s_alg = r.factor * p.s_m;
    }
    return r;
}

AlgStressResult coaxial(const StressPair& p, double tol_b)
{
    AlgStressResult r = midpoint_only(p);
    r.formula = StressFormula::coaxial;
    r.denominator = ddot_ext(p.c_m, p.z);
    if (std::abs(r.denominator) > tol_b) {
        r.enhancement_active = true;
        r.factor = r.numerator / r.denominator;
        r.s_alg = p.s_m + r.factor * p.c_m;
    }
    return r;
}

AlgStressResult algorithmic_stress(const StressPair& p, StressFormula f, double tol_b)
{
    switch (f) {
    case StressFormula::gonzalez: return gonzalez(p, tol_b);
    case StressFormula::scaled: return scaled_midpoint(p, tol_b);
    case StressFormula::coaxial: return coaxial(p, tol_b);
    case StressFormula::midpoint: return midpoint_only(p);
    }
    return midpoint_only(p);
}

Mat6 algorithmic_tangent(const StressPair& p, const AlgStressResult& r, const Mat6& c_mid, const SymTensor3& s_np1)
{
    // δC_m = δZ = ½ δC_{n+1}; δS_m = ¼ ℂ_m δc. Gradients below are row
    // vectors acting on the strain-Voigt δc.
    Mat6 t = 0.25 * c_mid;
    if (!r.enhancement_active) return t;

    const Voigt6 zs = p.z.stress_voigt();
    const Voigt6 sm = p.s_m.stress_voigt();
    const Voigt6 cm = p.c_m.stress_voigt();
    const Voigt6 g_dg = 0.5 * s_np1.stress_voigt();
    const Voigt6 g_sz = 0.25 * c_mid * p.z.strain_voigt() + 0.5 * sm;
    Voigt6 half_e;
    half_e << 0.5, 0.5, 0.5, 0.25, 0.25, 0.25;

    switch (r.formula) {
    case StressFormula::gonzalez: {
        const Voigt6 g_num = g_dg - g_sz;
        const Voigt6 g_den = zs;
        t.noalias() += zs * ((g_num - r.factor * g_den) / r.denominator).transpose();
        t.diagonal() += r.factor * half_e;
        break;
    }
    case StressFormula::scaled: {
        t *= r.factor;
        t.noalias() += sm * ((g_dg - r.factor * g_sz) / r.denominator).transpose();
        break;
    }
    case StressFormula::coaxial: {
        const Voigt6 g_num = g_dg - g_sz;
        const Voigt6 g_den = 0.5 * (zs + cm);
        t.noalias() += cm * ((g_num - r.factor * g_den) / r.denominator).transpose();
        t.diagonal() += r.factor * half_e;
        break;
    }
    case StressFormula::midpoint: break;
    }
    return t;
}

}  // namespace incel
