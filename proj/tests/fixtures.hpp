#pragma once

// Small discretized problems shared by the tests.

#include <memory>
#include <vector>

#include "incel/assembly.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace incel;

struct Problem {
    Discretization disc;
    DofMap dofs;
    OgdenModel model;
    LoadSpec loads;
    std::unique_ptr<Assembler> asmb;

    Problem(const Vec3& lo, const Vec3& hi, std::array<int, 3> el, OgdenModel m, LoadSpec l = {},
            std::vector<FaceId> clamp = {}, int p = 1, int a = 1, int b = 0)
        : disc(Geometry::box(lo, hi), build_mixed_spaces(p, a, b, el)),
          dofs(DofMap::build(disc, clamp)),
          model(std::move(m)),
          loads(std::move(l))
    {
        asmb = std::make_unique<Assembler>(disc, dofs, model, loads);
    }
};

/// Coefficients of the affine field G X + c (box geometry, Greville interpolation).
inline Vector affine_velocity_field(const Discretization& d, const Vec3& lo, const Vec3& hi, const Tensor3& g, const Vec3& c)
{
    const TensorSpace& vs = d.spaces().velocity;
    Vector out(3 * vs.dimension());
    for (int n = 0; n < vs.dimension(); ++n) {
        const auto mi = vs.multi_index(n);
        Vec3 x;
        for (int k = 0; k < 3; ++k) {
            const double u = oracle::greville(vs.knots(k).knots(), vs.knots(k).degree(), mi[k]);
            x[k] = lo[k] + (hi[k] - lo[k]) * u;
        }
        out.segment<3>(3 * n) = g * x + c;
    }
    return out;
}

inline Vector affine_pressure_field(const Discretization& d, const Vec3& lo, const Vec3& hi, const Vec3& a, double b)
{
    const TensorSpace& ps = d.spaces().pressure;
    Vector out(ps.dimension());
    for (int n = 0; n < ps.dimension(); ++n) {
        const auto mi = ps.multi_index(n);
        Vec3 x;
        for (int k = 0; k < 3; ++k) {
            const double u = oracle::greville(ps.knots(k).knots(), ps.knots(k).degree(), mi[k]);
            x[k] = lo[k] + (hi[k] - lo[k]) * u;
        }
        out[n] = a.dot(x) + b;
    }
    return out;
}

}  // namespace fixture
