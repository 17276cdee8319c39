#include <doctest.h>

#include <cmath>
#include <random>

#include "incel/algostress.hpp"
#include "incel/error.hpp"
#include "oracles.hpp"

using namespace incel;

namespace {

Tensor3 f1()
{
    Tensor3 f;
    f << 1.5, 0, 0, 0.1, 0.8, 0, 0, 0, 1;
    return f;
}

Tensor3 d_comp()
{
    Tensor3 d;
    d << 0, 0, 0, 0, -1, 0, 0, 0, 1;
    return d;
}

OgdenModel unit_column_model()
{
    // Twisting-column terms scaled to unit ground-state shear modulus.
    OgdenModel m{{{6.3e5, 1.3}, {1.2e3, 5.0}, {-1e4, -2.0}}, 1.0};
    const double g = m.shear_modulus();
    for (auto& t : m.terms) t.mu /= g;
    return m;
}

constexpr StressFormula kEnhanced[] = {StressFormula::gonzalez, StressFormula::scaled, StressFormula::coaxial};

SymTensor3 unit_direction(int j)
{
    Voigt6 v = Voigt6::Zero();
    v[j] = j < 3 ? 1.0 : 0.5;
    return SymTensor3::from_stress_voigt(v);
}

}  // namespace

TEST_CASE("formula names")
{
    for (auto f : {StressFormula::gonzalez, StressFormula::scaled, StressFormula::coaxial, StressFormula::midpoint}) {
        CHECK(parse_formula(to_string(f)) == f);
    }
    CHECK_THROWS_AS(parse_formula("romero"), ConfigError);
}

TEST_CASE("identical states switch the enhancement off")
{
    const OgdenModel m = OgdenModel::neo_hookean(5000);
    const SymTensor3 c = SymTensor3::right_cauchy_green(f1());
    const StressPair p = StressPair::make(c, c, m);
    for (auto f : kEnhanced) {
        const auto r = algorithmic_stress(p, f);
        CHECK_FALSE(r.enhancement_active);
        CHECK(norm(r.s_alg - s_ich(c, m)) <= 1e-14 * norm(r.s_alg));
    }
    const StressPair q = StressPair::make(SymTensor3::identity(), SymTensor3::identity(), m);
    CHECK(norm(midpoint_only(q).s_alg) == 0.0);
}

TEST_CASE("directionality on the compression pair")
{
    const OgdenModel m = OgdenModel::neo_hookean(5000);
    const Tensor3 f2 = f1() + 0.1 * d_comp();
    const StressPair p = StressPair::make(SymTensor3::right_cauchy_green(f1()), SymTensor3::right_cauchy_green(f2), m);
    for (auto f : kEnhanced) {
        const auto r = algorithmic_stress(p, f);
        REQUIRE(r.enhancement_active);
        CHECK(std::abs(ddot(r.s_alg, p.z) - p.delta_g()) <= 1e-12 * std::abs(p.delta_g()));
    }
    // The plain mid-point stress misses the energy increment.
    CHECK(std::abs(ddot(midpoint_only(p).s_alg, p.z) - p.delta_g()) > 1e-6 * std::abs(p.delta_g()));
}

TEST_CASE("directionality on random pairs")
{
    std::mt19937_64 rng(41);
    const OgdenModel m = unit_column_model();
    int active = 0;
    for (int i = 0; i < 2000; ++i) {
        const StressPair p = StressPair::make(oracle::random_spd(rng, 30.0), oracle::random_spd(rng, 30.0), m);
        for (auto f : kEnhanced) {
            const auto r = algorithmic_stress(p, f);
            if (!r.enhancement_active) continue;
            ++active;
            CHECK(std::abs(ddot(r.s_alg, p.z) - p.delta_g()) <= 1e-12 * std::max(1.0, std::abs(p.delta_g())));
        }
        const auto mid = midpoint_only(p);
        CHECK(mid.s_alg == p.s_m);
    }
    CHECK(active > 5000);
}

TEST_CASE("coaxial denominator")
{
    const OgdenModel m = OgdenModel::neo_hookean(1.0);
    std::mt19937_64 rng(43);
    for (int i = 0; i < 100; ++i) {
        const SymTensor3 a = oracle::random_spd(rng, 10.0), b = oracle::random_spd(rng, 10.0);
        const StressPair p = StressPair::make(a, b, m);
        const double ref = (ddot(b, b) - ddot(a, a)) / 4.0;
        CHECK(std::abs(coaxial(p).denominator - ref) <= 1e-14 * (ddot(a, a) + ddot(b, b)));
    }
    // Equal norms, distinct states.
    const StressPair p = StressPair::make(SymTensor3(2, 1, 1, 0, 0, 0), SymTensor3(1, 2, 1, 0, 0, 0), m);
    const auto r = coaxial(p);
    CHECK(r.denominator == 0.0);
    CHECK_FALSE(r.enhancement_active);
    CHECK(r.s_alg == p.s_m);
    CHECK(gonzalez(p).enhancement_active);
}

TEST_CASE("algorithmic tangent matches finite differences")
{
    std::mt19937_64 rng(47);
    const OgdenModel m = unit_column_model();
    for (int i = 0; i < 100; ++i) {
        const SymTensor3 c_n = oracle::random_spd(rng, 5.0);
        const SymTensor3 c_np1 = c_n + 0.3 * oracle::random_sym(rng, -1.0, 1.0);
        if (sym_eigen(c_np1).values[2] < 0.2) continue;
        const StressPair p = StressPair::make(c_n, c_np1, m);
        const Mat6 cm = c_ich(p.c_m, m);
        const SymTensor3 s1 = s_ich(c_np1, m);
        for (auto f : {StressFormula::gonzalez, StressFormula::scaled, StressFormula::coaxial, StressFormula::midpoint}) {
            const auto r = algorithmic_stress(p, f);
            if (f != StressFormula::midpoint && std::abs(r.denominator) < 1e-2) continue;
            const Mat6 t = algorithmic_tangent(p, r, cm, s1);
            Mat6 fd;
            const double h = 1e-6;
            for (int j = 0; j < 6; ++j) {
                const SymTensor3 e = unit_direction(j);
                const auto rp = algorithmic_stress(StressPair::make(c_n, c_np1 + h * e, m), f);
                const auto rm = algorithmic_stress(StressPair::make(c_n, c_np1 - h * e, m), f);
                fd.col(j) = (rp.s_alg - rm.s_alg).stress_voigt() / (2.0 * h);
            }
            CHECK((t - fd).norm() <= 1e-5 * fd.norm());
        }
    }
}

TEST_CASE("second-order consistency")
{
    const OgdenModel m = unit_column_model();
    const SymTensor3 a(0.3, -0.2, 0.1, 0.15, -0.05, 0.1);
    const SymTensor3 b(0.1, 0.2, -0.1, 0.05, 0.1, -0.02);
    const auto path = [&](double t) { return SymTensor3::identity() + t * a + (t * t) * b; };
    const double tm = 0.7;
    for (auto f : kEnhanced) {
        double prev = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double dt = 0.08 / std::pow(2.0, k);
            const StressPair p = StressPair::make(path(tm - dt / 2), path(tm + dt / 2), m);
            const double err = norm(algorithmic_stress(p, f, 0.0).s_alg - s_ich(path(tm), m));
            if (k > 0) {
                const double ratio = prev / err;
                CHECK(ratio > 3.5);
                CHECK(ratio < 4.5);
            }
            prev = err;
        }
    }
}
