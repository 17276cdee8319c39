#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <limits>
#include <random>

#include "incel/error.hpp"
#include "incel/tensor3.hpp"
#include "oracles.hpp"

using namespace incel;

namespace {

Tensor3 f1()
{
    Tensor3 f;
    f << 1.5, 0, 0, 0.1, 0.8, 0, 0, 0, 1;
    return f;
}

void check_decomp(const SymTensor3& a, const SpectralDecomp& d, double rec_tol)
{
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(d.vectors[k].norm() - 1.0) <= 1e-14);
        for (int l = k + 1; l < 3; ++l) CHECK(std::abs(d.vectors[k].dot(d.vectors[l])) <= 1e-12);
    }
    CHECK(d.values[0] >= d.values[1]);
    CHECK(d.values[1] >= d.values[2]);
    CHECK(norm(d.reconstruct() - a) <= rec_tol * std::max(norm(a), std::numeric_limits<double>::min()));
}

}  // namespace

TEST_CASE("voigt conventions")
{
    const SymTensor3 a(1, 2, 3, 4, 5, 6);
    const SymTensor3 b(-1, 0.5, 2, 1, -3, 0.25);
    CHECK(a.stress_voigt().dot(b.strain_voigt()) == doctest::Approx(ddot(a, b)));
    CHECK(ddot(a, b) == doctest::Approx((a.to_matrix().array() * b.to_matrix().array()).sum()));
    CHECK(a(2, 1) == 6);
    CHECK(SymTensor3::from_matrix(a.to_matrix()) == a);
    CHECK(SymTensor3::from_stress_voigt(a.stress_voigt()) == a);
}

TEST_CASE("det, inverse and cofactor")
{
    CHECK(det(f1()) == doctest::Approx(1.2).epsilon(1e-15));
    const SymTensor3 c = SymTensor3::right_cauchy_green(f1());
    CHECK(det(c) == doctest::Approx(1.44).epsilon(1e-14));
    CHECK(norm(SymTensor3::from_matrix(c.to_matrix() * inverse(c).to_matrix()) - SymTensor3::identity()) < 1e-14);
    CHECK((inverse(f1()) * f1() - Tensor3::Identity()).norm() < 1e-15);
    CHECK((cofactor(f1()) - det(f1()) * inverse(f1()).transpose()).norm() < 1e-15);
    CHECK_THROWS_AS(inverse(SymTensor3(1, 1, 0, 1, 0, 0)), NumericalError);
}

TEST_CASE("deviatoric projection")
{
    CHECK(norm(dev_projection(SymTensor3::identity(), SymTensor3::identity())) == 0.0);
    std::mt19937_64 rng(7);
    const SymTensor3 c = SymTensor3::right_cauchy_green(f1());
    for (int i = 0; i < 1000; ++i) {
        const SymTensor3 t = oracle::random_sym(rng, -10, 10);
        CHECK(std::abs(ddot(dev_projection(c, t), c)) <= 1e-13 * norm(t) * norm(c));
    }
}

TEST_CASE("eigen: trivial cases")
{
    const auto d = sym_eigen(SymTensor3::identity());
    CHECK(d.multiplicity == Multiplicity::all_coincident);
    for (double v : d.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    check_decomp(SymTensor3::identity(), d, 1e-14);

    const SymTensor3 dg(4, 1, 0.25, 0, 0, 0);
    const auto e = sym_eigen(dg);
    CHECK(e.multiplicity == Multiplicity::distinct);
    CHECK(e.values[0] == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.values[2] == doctest::Approx(0.25).epsilon(1e-15));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(std::abs(e.vectors[k][k]) - 1.0) < 1e-15);

    const auto z = sym_eigen(SymTensor3::zero());
    CHECK(z.multiplicity == Multiplicity::all_coincident);

    CHECK_THROWS_AS(sym_eigen(SymTensor3(1, std::nan(""), 0, 0, 0, 0)), NumericalError);
    CHECK_THROWS_AS(sym_eigen(SymTensor3(1, 0, 0, std::numeric_limits<double>::infinity(), 0, 0)), NumericalError);
}

TEST_CASE("eigen: F1ᵀF1 against characteristic polynomial")
{
    const SymTensor3 c = SymTensor3::right_cauchy_green(f1());
    const auto d = sym_eigen(c);
    const auto r = oracle::char_poly_roots(c);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(d.values[k] - r[k]) <= 1e-12);
    CHECK(d.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    check_decomp(c, d, 1e-14);
}

TEST_CASE("eigen: random symmetric matrices")
{
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const SymTensor3 a = oracle::random_sym(rng, -10, 10);
        const auto d = sym_eigen(a);
        check_decomp(a, d, 1e-11);
        const auto r = oracle::char_poly_roots(a);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(d.values[k] - r[k]) <= 1e-12 * norm(a));
    }
}

TEST_CASE("eigen: nearly coincident eigenvalues")
{
    std::mt19937_64 rng(99);
    for (int k = 0; k <= 15; ++k) {
        for (int rep = 0; rep < 50; ++rep) {
            const Tensor3 q = oracle::random_rotation(rng);
            const double gap = std::pow(10.0, -k);
            for (int variant = 0; variant < 2; ++variant) {
                // Pair at the top or at the bottom of the spectrum.
                const double d1 = variant == 0 ? 2.0 + gap : 2.0;
                const double d2 = variant == 0 ? 2.0 : 0.5 + gap;
                const double d3 = variant == 0 ? 0.5 : 0.5;
                const SymTensor3 a = oracle::with_eigenvalues(q, d1, d2, d3);
                const auto d = sym_eigen(a);
                check_decomp(a, d, 1e-12);
                std::array<double, 3> ref{d1, d2, d3};
                std::sort(ref.begin(), ref.end(), std::greater<>());
                for (int j = 0; j < 3; ++j) CHECK(std::abs(d.values[j] - ref[j]) <= 1e-12 * norm(a));
            }
        }
    }
}

TEST_CASE("eigen: multiplicity and invariant subspaces")
{
    std::mt19937_64 rng(5);
    const Tensor3 q = oracle::random_rotation(rng);
    const SymTensor3 a = oracle::with_eigenvalues(q, 3.0, 1.0, 1.0);
    const auto d = sym_eigen(a);
    CHECK(d.multiplicity == Multiplicity::two_coincident);
    // The distinct eigenvector is the first column of q up to sign.
    CHECK(std::abs(std::abs(d.vectors[0].dot(q.col(0))) - 1.0) < 1e-13);
    const SymTensor3 b = oracle::with_eigenvalues(q, 1.0, 1.0, 1.0);
    CHECK(sym_eigen(b).multiplicity == Multiplicity::all_coincident);
    CHECK(sym_eigen(oracle::with_eigenvalues(q, 1.0, 1.0 + 1e-6, 0.2)).multiplicity == Multiplicity::distinct);
}
