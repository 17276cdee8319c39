#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "incel/error.hpp"
#include "incel/spline.hpp"

using namespace incel;

namespace {

/// Cox–de Boor recursion straight from the definition, in long double.
long double cox_de_boor(const std::vector<double>& k, int i, int p, long double u)
{
    if (p == 0) {
        const bool last = k[i + 1] == 1.0 && u == 1.0L && k[i] < k[i + 1];
        return (k[i] <= u && u < k[i + 1]) || last ? 1.0L : 0.0L;
    }
    long double a = 0, b = 0;
    if (k[i + p] > k[i]) a = (u - k[i]) / (k[i + p] - k[i]) * cox_de_boor(k, i, p - 1, u);
    if (k[i + p + 1] > k[i + 1]) b = (k[i + p + 1] - u) / (k[i + p + 1] - k[i + 1]) * cox_de_boor(k, i + 1, p - 1, u);
    return a + b;
}

double greville(const KnotVector& kv, int i)
{
    double s = 0.0;
    for (int j = 1; j <= kv.degree(); ++j) s += kv.knots()[i + j];
    return s / kv.degree();
}

}  // namespace

TEST_CASE("univariate basis")
{
    const KnotVector kv(1, {0, 0, 0.5, 1, 1});
    CHECK(kv.dimension() == 3);
    CHECK(kv.elements() == 2);
    double v[2], d[2];
    const int s = kv.find_span(0.25);
    kv.eval(s, 0.25, v, d);
    CHECK(v[0] == doctest::Approx(0.5));
    CHECK(v[1] == doctest::Approx(0.5));
    CHECK(d[0] == doctest::Approx(-2.0));
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK_THROWS(kv.find_span(1.5));
    CHECK_THROWS(kv.find_span(-0.1));
    CHECK(kv.find_span(1.0) == kv.element_span(1));

    const KnotVector q = KnotVector::uniform(2, 4, 1);
    CHECK(q.dimension() == 6);
    const int sq = q.find_span(0.3);
    double vq[3], dq[3];
    q.eval(sq, 0.3, vq, dq);
    for (int r = 0; r < 3; ++r) {
        CHECK(std::abs(vq[r] - (double)cox_de_boor(q.knots(), sq - 2 + r, 2, 0.3L)) <= 1e-13);
        const long double h = 1e-7L;
        const long double fd = (cox_de_boor(q.knots(), sq - 2 + r, 2, 0.3L + h) - cox_de_boor(q.knots(), sq - 2 + r, 2, 0.3L - h)) / (2 * h);
        CHECK(std::abs(dq[r] - (double)fd) <= 1e-6);
    }
}

TEST_CASE("knot vector validation")
{
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 1, 1}), ConfigError);
    CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.7, 0.5, 1, 1}), ConfigError);
    CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.5, 0.5, 1, 1}), ConfigError);
    CHECK_THROWS_AS(KnotVector(1, {0, 0.1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(KnotVector::uniform(2, 3, 2), ConfigError);
    CHECK(KnotVector::uniform(3, 4, 1).regularity() == 1);
    CHECK(KnotVector::uniform(3, 1, 0).regularity() == 3);
}

TEST_CASE("partition of unity")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MixedSpaces ms = build_mixed_spaces(2, 1, 0, {3, 2, 4});
    std::vector<double> w(ms.velocity.dimension());
    for (auto& x : w) x = 0.5 + u(rng);
    const TensorSpace nurbs({ms.velocity.knots(0), ms.velocity.knots(1), ms.velocity.knots(2)}, w);
    for (const TensorSpace* sp : {&ms.velocity, &ms.pressure, &nurbs}) {
        for (int i = 0; i < 1000; ++i) {
            const BasisValues b = sp->eval(Vec3(u(rng), u(rng), u(rng)));
            double sum = 0.0;
            Vec3 dsum = Vec3::Zero();
            for (std::size_t a = 0; a < b.value.size(); ++a) {
                CHECK(b.value[a] >= -1e-15);
                sum += b.value[a];
                dsum += b.grad[a];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            CHECK(dsum.norm() <= 1e-12);
        }
    }
}

TEST_CASE("mixed space dimensions")
{
    auto ms = build_mixed_spaces(1, 1, 0, {2, 2, 2});
    CHECK(ms.pressure.dimension() == 27);
    CHECK(ms.velocity.knots(0).degree() == 2);
    CHECK(ms.velocity.knots(0).regularity() == 0);
    CHECK(ms.velocity.dimension(0) == 5);
    CHECK(ms.velocity.elements() == ms.pressure.elements());

    ms = build_mixed_spaces(2, 1, 0, {4, 4, 4});
    CHECK(ms.pressure.dimension(0) == 6);
    CHECK(ms.pressure.knots(0).regularity() == 1);

    ms = build_mixed_spaces(1, 2, 1, {1, 1, 1});
    CHECK(ms.pressure.dimension() == 8);
    CHECK(ms.velocity.dimension() == 64);

    ms = build_mixed_spaces(1, 1, 0, {3, 3, 11});
    CHECK(ms.velocity.dimension() == 7 * 7 * 23);
    CHECK(ms.pressure.dimension() == 4 * 4 * 12);
    CHECK(ms.velocity.elements() == 99);

    CHECK_THROWS_AS(build_mixed_spaces(1, 0, 0, {1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(build_mixed_spaces(1, 1, 1, {1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(build_mixed_spaces(0, 1, 0, {1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(build_mixed_spaces(1, 1, 0, {1, 0, 1}), ConfigError);
}

TEST_CASE("element functions match evaluation order")
{
    const MixedSpaces ms = build_mixed_spaces(1, 1, 0, {2, 3, 2});
    BasisValues b;
    for (int e = 0; e < ms.velocity.elements(); ++e) {
        ms.velocity.eval_element(e, Vec3(0.5, 0.5, 0.5), b);
        CHECK(b.index == ms.velocity.element_functions(e));
    }
    CHECK(ms.velocity.face_functions(2, 0).size() == 35);
}

TEST_CASE("linear reproduction")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MixedSpaces ms = build_mixed_spaces(1, 1, 0, {3, 2, 5});
    const TensorSpace& v = ms.velocity;
    const Vec3 c0(0.3, -1.0, 2.0), g(1.5, -0.25, 0.75);
    std::vector<double> coef(v.dimension());
    for (int i = 0; i < v.dimension(); ++i) {
        const auto m = v.multi_index(i);
        const Vec3 x(greville(v.knots(0), m[0]), greville(v.knots(1), m[1]), greville(v.knots(2), m[2]));
        coef[i] = c0.dot(Vec3::Ones()) + g.dot(x);
    }
    for (int k = 0; k < 1000; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        const BasisValues b = v.eval(x);
        double f = 0.0;
        Vec3 df = Vec3::Zero();
        for (std::size_t a = 0; a < b.value.size(); ++a) {
            f += coef[b.index[a]] * b.value[a];
            df += coef[b.index[a]] * b.grad[a];
        }
        CHECK(std::abs(f - (c0.sum() + g.dot(x))) <= 1e-12);
        CHECK((df - g).norm() <= 1e-12);
    }
}

TEST_CASE("geometry maps")
{
    const Geometry unit = Geometry::box(Vec3::Zero(), Vec3::Ones());
    CHECK(unit.is_box());
    Tensor3 j;
    const Vec3 x = unit.map(Vec3(0.2, 0.4, 0.9), &j);
    CHECK((x - Vec3(0.2, 0.4, 0.9)).norm() <= 1e-15);
    CHECK((j - Tensor3::Identity()).norm() <= 1e-15);

    const Geometry column = Geometry::box(Vec3(-0.5, -0.5, 0.0), Vec3(0.5, 0.5, 6.0));
    column.map(Vec3(0.1, 0.7, 0.3), &j);
    CHECK((j - Vec3(1, 1, 6).asDiagonal().toDenseMatrix()).norm() <= 1e-14);
    const Geometry beam = Geometry::box(Vec3(-0.005, -0.005, 0.0), Vec3(0.005, 0.005, 0.3));
    beam.map(Vec3(0.5, 0.5, 0.5), &j);
    CHECK(det(j) == doctest::Approx(0.01 * 0.01 * 0.3));
    CHECK(beam.map(Vec3(0.5, 1.0, 1.0)).isApprox(Vec3(0, 0.005, 0.3)));

    std::vector<Vec3> pts = unit.control_points();
    std::swap(pts[0], pts[1]);
    const Geometry flipped(unit.space(), pts);
    CHECK_FALSE(flipped.is_box());
    CHECK_THROWS_AS(flipped.map(Vec3(0.1, 0.1, 0.1), &j), MeshError);
    CHECK_THROWS_AS(Geometry::box(Vec3::Zero(), Vec3(1, 0, 1)), MeshError);
}

TEST_CASE("patch file")
{
    std::istringstream ok(R"(# unit cube, degree 1
degree 1 1 1
knots0 0 0 1 1
knots1 0 0 1 1
knots2 0 0 1 1
points 8
0 0 0
1 0 0
0 1 0
1 1 0
0 0 2
1 0 2
0 1 2
1 1 2
)");
    const Geometry g = read_patch(ok);
    CHECK(g.is_box());
    CHECK(g.bounds().second.isApprox(Vec3(1, 1, 2)));

    std::istringstream bad("degree 1 1 1\nknots0 0 0 1 1\nknots1 0 0 1 1\nknots2 0 0 1 1\npoints 8\n0 0 0\n1 0 x\n");
    try {
        read_patch(bad);
        FAIL("expected error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 7);
    }
    std::istringstream unknown("degree 1 1 1\nfoo 1\n");
    CHECK_THROWS_AS(read_patch(unknown), ConfigError);
}

TEST_CASE("gauss-legendre")
{
    for (int n = 1; n <= 8; ++n) {
        const QuadratureRule q = gauss_legendre(n);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.points[i], k);
            CHECK(std::abs(s - 1.0 / (k + 1)) <= 1e-15 * 4);
        }
        for (int i = 1; i < n; ++i) CHECK(q.points[i] > q.points[i - 1]);
    }
}
