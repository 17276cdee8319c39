#pragma once

#include <string_view>

#include "incel/material.hpp"
#include "incel/tensor3.hpp"

namespace incel {

enum class StressFormula { gonzalez, scaled, coaxial, midpoint };

const char* to_string(StressFormula f);
/// Throws ConfigError for unknown names.
StressFormula parse_formula(std::string_view name);

/// Default switching tolerance for the enhancement denominators.
inline constexpr double kDefaultTolB = 1e-10;

/// Mid-point quantities of a pair (C_n, C_{n+1}).
struct StressPair {
    SymTensor3 c_n;
    SymTensor3 c_np1;
    SymTensor3 c_m;   ///< (C_n + C_{n+1})/2
    SymTensor3 z;     ///< (C_{n+1} − C_n)/2
    double g_n = 0.0;
    double g_np1 = 0.0;
    SymTensor3 s_m;   ///< S_ich(C_m)

    double delta_g() const { return g_np1 - g_n; }

    /// Evaluates both end-point energies and S_ich(C_m).
    static StressPair make(const SymTensor3& c_n, const SymTensor3& c_np1, const OgdenModel& m);
};

struct AlgStressResult {
    SymTensor3 s_alg;
    bool enhancement_active = false;
    /// Z:Z, S_m:Z, C_m:Z or 0 depending on the formula.
    double denominator = 0.0;
    /// ΔG − S_m:Z.
    double numerator = 0.0;
    /// Enhancement factor multiplying the formula's direction (Z, S_m or C_m);
    /// for the scaled formula this is ΔG/(S_m:Z).
    double factor = 0.0;
    StressFormula formula = StressFormula::midpoint;

    SymTensor3 enhancement(const StressPair& p) const { return s_alg - p.s_m; }
};

/// S_alg for the chosen formula. Enhancement is switched off when the raw
/// denominator is not larger than tol_b in magnitude (Z:Z for gonzalez,
/// |S_m:Z| for scaled, |C_m:Z| for coaxial).
AlgStressResult algorithmic_stress(const StressPair& p, StressFormula f, double tol_b = kDefaultTolB);

AlgStressResult gonzalez(const StressPair& p, double tol_b = kDefaultTolB);
AlgStressResult scaled_midpoint(const StressPair& p, double tol_b = kDefaultTolB);
AlgStressResult coaxial(const StressPair& p, double tol_b = kDefaultTolB);
AlgStressResult midpoint_only(const StressPair& p);

/// Derivative of S_alg with respect to C_{n+1} (C_n fixed), as a 6×6 matrix T
/// with δS_alg.stress_voigt() = T · δC_{n+1}.strain_voigt().
///
/// `c_mid` is ℂ_ich(C_m) in the same convention, `s_np1` is S_ich(C_{n+1}).
Mat6 algorithmic_tangent(const StressPair& p, const AlgStressResult& r, const Mat6& c_mid, const SymTensor3& s_np1);

}  // namespace incel
