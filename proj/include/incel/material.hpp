#pragma once

#include <array>
#include <string>
#include <vector>

#include "incel/tensor3.hpp"

namespace incel {

struct OgdenTerm {
    double mu = 0.0;
    double alpha = 0.0;

    friend bool operator==(const OgdenTerm&, const OgdenTerm&) = default;
};

/// Ogden isochoric energy G = Σ_a Σ_p μ_p/α_p (λ̃_a^{α_p} − 1) plus the
/// reference density.
struct OgdenModel {
    std::vector<OgdenTerm> terms;
    double rho0 = 1.0;

    /// Single-term α = 2 model, G = (μ/2)(tr C̃ − 3).
    static OgdenModel neo_hookean(double mu, double rho0 = 1.0);

    /// Σ_p μ_p α_p / 2.
    double shear_modulus() const;

    /// Throws ConfigError for an empty model, α_p = 0, non-finite entries or
    /// ρ₀ <= 0. Returns a warning string (empty if none) when the ground-state
    /// shear modulus is not positive.
    std::string validate() const;

    friend bool operator==(const OgdenModel&, const OgdenModel&) = default;
};

/// Principal stretches of C.
struct StretchState {
    double J = 1.0;
    std::array<double, 3> lambda{1.0, 1.0, 1.0};
    /// Squared stretches, i.e. eigenvalues of C (descending).
    std::array<double, 3> lambda_sq{1.0, 1.0, 1.0};
    /// log λ̃_a, shifted so that Σ log λ̃_a = 0 to round-off.
    std::array<double, 3> log_mod{0.0, 0.0, 0.0};
    std::array<double, 3> mod{1.0, 1.0, 1.0};
    std::array<Vec3, 3> vectors{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    Multiplicity multiplicity = Multiplicity::all_coincident;
    double coincidence_tolerance = 0.0;
};

/// Throws NumericalError if C is not positive definite (eigenvalue <= 1e-14).
StretchState stretch_state(const SymTensor3& c);

/// Energy from modified stretches λ̃ (all > 0).
double g_ich(const std::array<double, 3>& mod_stretch, const OgdenModel& m);
double g_ich(const StretchState& s, const OgdenModel& m);
double g_ich(const SymTensor3& c, const OgdenModel& m);

SymTensor3 s_ich(const SymTensor3& c, const OgdenModel& m);

/// −J P C⁻¹.
SymTensor3 s_vol(const SymTensor3& c, double pressure);

enum class ElasticityVariant { corrected, conventional };

const char* to_string(ElasticityVariant v);

/// ℂ = 2 ∂S_ich/∂C as a 6×6 matrix acting on strain-like Voigt vectors and
/// producing stress-like ones: (ℂ:E) = C6 · E.strain_voigt().
Mat6 c_ich(const SymTensor3& c, const OgdenModel& m);
/// Same structure without the −2λ_a^{-4} Σ μ_p(λ̃_a^{α_p} − ⅓Σ_c λ̃_c^{α_p})
/// diagonal contribution.
Mat6 c_ich_conventional(const SymTensor3& c, const OgdenModel& m);

struct IchResponse {
    double energy = 0.0;
    SymTensor3 stress;
    Mat6 tangent = Mat6::Zero();
};

/// Energy, stress and (if requested) elasticity from one spectral decomposition.
IchResponse evaluate_ich(const SymTensor3& c, const OgdenModel& m, bool with_tangent = false,
                         ElasticityVariant variant = ElasticityVariant::corrected);

}  // namespace incel
