#include "incel/tensor3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "incel/error.hpp"

namespace incel {

SymTensor3 SymTensor3::from_matrix(const Tensor3& a)
{
    return {a(0, 0),
            a(1, 1),
            a(2, 2),
            0.5 * (a(0, 1) + a(1, 0)),
            0.5 * (a(0, 2) + a(2, 0)),
            0.5 * (a(1, 2) + a(2, 1))};
}

SymTensor3 SymTensor3::right_cauchy_green(const Tensor3& f)
{
    const auto col = [&](int i, int j) { return f.col(i).dot(f.col(j)); };
    return {col(0, 0), col(1, 1), col(2, 2), col(0, 1), col(0, 2), col(1, 2)};
}

SymTensor3 SymTensor3::outer(const Vec3& n)
{
    return {n[0] * n[0], n[1] * n[1], n[2] * n[2], n[0] * n[1], n[0] * n[2], n[1] * n[2]};
}

SymTensor3 SymTensor3::from_stress_voigt(const Voigt6& v)
{
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

Tensor3 SymTensor3::to_matrix() const
{
    Tensor3 m;
    m << c_[0], c_[3], c_[4], c_[3], c_[1], c_[5], c_[4], c_[5], c_[2];
    return m;
}

Voigt6 SymTensor3::stress_voigt() const
{
    Voigt6 v;
    v << c_[0], c_[1], c_[2], c_[3], c_[4], c_[5];
    return v;
}

Voigt6 SymTensor3::strain_voigt() const
{
    Voigt6 v;
    v << c_[0], c_[1], c_[2], 2.0 * c_[3], 2.0 * c_[4], 2.0 * c_[5];
    return v;
}

bool SymTensor3::all_finite() const
{
    return std::all_of(c_.begin(), c_.end(), [](double x) { return std::isfinite(x); });
}

SymTensor3& SymTensor3::operator+=(const SymTensor3& o)
{
    for (int k = 0; k < 6; ++k) c_[k] += o.c_[k];
    return *this;
}

SymTensor3& SymTensor3::operator-=(const SymTensor3& o)
{
    for (int k = 0; k < 6; ++k) c_[k] -= o.c_[k];
    return *this;
}

SymTensor3& SymTensor3::operator*=(double s)
{
    for (auto& x : c_) x *= s;
    return *this;
}

double ddot(const SymTensor3& a, const SymTensor3& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + 2.0 * (a[3] * b[3] + a[4] * b[4] + a[5] * b[5]);
}

double norm(const SymTensor3& a) { return std::sqrt(ddot(a, a)); }

double det(const SymTensor3& a)
{
    return a[0] * (a[1] * a[2] - a[5] * a[5]) - a[3] * (a[3] * a[2] - a[5] * a[4]) +
           a[4] * (a[3] * a[5] - a[1] * a[4]);
}

double det(const Tensor3& a)
{
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Tensor3 cofactor(const Tensor3& a)
{
    Tensor3 c;
    c(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    c(0, 1) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    c(0, 2) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    c(1, 0) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    c(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    c(1, 2) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    c(2, 0) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    c(2, 1) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    c(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return c;
}

namespace {

void require_invertible(double d, double scale)
{
    if (!std::isfinite(d) || std::abs(d) <= 1e-300 * scale * scale * scale) {
        throw NumericalError("singular tensor: determinant " + std::to_string(d));
    }
}

}  // namespace

SymTensor3 inverse(const SymTensor3& a)
{
    const double d = det(a);
    require_invertible(d, norm(a));
    const double s = 1.0 / d;
    return {s * (a[1] * a[2] - a[5] * a[5]),
            s * (a[0] * a[2] - a[4] * a[4]),
            s * (a[0] * a[1] - a[3] * a[3]),
            s * (a[4] * a[5] - a[3] * a[2]),
            s * (a[3] * a[5] - a[4] * a[1]),
            s * (a[3] * a[4] - a[0] * a[5])};
}

Tensor3 inverse(const Tensor3& a)
{
    const double d = det(a);
    require_invertible(d, a.norm());
    return cofactor(a).transpose() / d;
}

SymTensor3 dev_projection(const SymTensor3& c, const SymTensor3& t)
{
    return t - (ddot(c, t) / 3.0) * inverse(c);
}

const char* to_string(Multiplicity m)
{
    switch (m) {
    case Multiplicity::distinct: return "distinct";
    case Multiplicity::two_coincident: return "two-coincident";
    case Multiplicity::all_coincident: return "all-coincident";
    }
    return "?";
}

SymTensor3 SpectralDecomp::reconstruct() const
{
    SymTensor3 r;
    for (int a = 0; a < 3; ++a) r += values[a] * SymTensor3::outer(vectors[a]);
    return r;
}

namespace {

/// Any unit vector orthogonal to the unit vector n.
Vec3 any_orthogonal(const Vec3& n)
{
    int k = 0;
    if (std::abs(n[1]) < std::abs(n[k])) k = 1;
    if (std::abs(n[2]) < std::abs(n[k])) k = 2;
    Vec3 e = Vec3::Zero();
    e[k] = 1.0;
    return n.cross(e).normalized();
}

/// Eigenvector of the symmetric matrix m (assumed to have a simple eigenvalue
/// eta) from the two best-conditioned columns of (m − eta I). Also returns an
/// orthonormal pair spanning the orthogonal complement.
Vec3 simple_eigenvector(const Tensor3& m, double eta, Vec3& u1, Vec3& u2)
{
    Tensor3 r = m;
    r.diagonal().array() -= eta;
    std::array<double, 3> len{r.col(0).norm(), r.col(1).norm(), r.col(2).norm()};
    const int k = static_cast<int>(std::max_element(len.begin(), len.end()) - len.begin());
    if (len[k] == 0.0) {
        u1 = Vec3::UnitX();
        u2 = Vec3::UnitY();
        return Vec3::UnitZ();
    }
    const Vec3 s1 = r.col(k) / len[k];
    const int ia = (k + 1) % 3;
    const int ib = (k + 2) % 3;
    const Vec3 ta = r.col(ia) - s1.dot(r.col(ia)) * s1;
    const Vec3 tb = r.col(ib) - s1.dot(r.col(ib)) * s1;
    const Vec3& t = ta.norm() >= tb.norm() ? ta : tb;
    const double tn = t.norm();
    const Vec3 s2 = tn > std::numeric_limits<double>::epsilon() ? Vec3(t / tn) : any_orthogonal(s1);
    u1 = s1;
    u2 = s2;
    return s1.cross(s2).normalized();
}

}  // namespace

SpectralDecomp sym_eigen(const SymTensor3& a)
{
    if (!a.all_finite()) {
        throw NumericalError("sym_eigen: non-finite tensor component");
    }
    SpectralDecomp out;
    const double scale = norm(a);
    out.coincidence_tolerance = 1e-12 * std::max(1.0, scale);
    if (scale == 0.0) {
        out.vectors = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
        out.multiplicity = Multiplicity::all_coincident;
        return out;
    }

    // Work on the deviator of the normalized tensor.
    const SymTensor3 an = a * (1.0 / scale);
    const double mean = an.trace() / 3.0;
    SymTensor3 dev = an;
    for (int k = 0; k < 3; ++k) dev[k] -= mean;
    const double j2 = 0.5 * ddot(dev, dev);

    std::array<double, 3> eta{};
    std::array<Vec3, 3> vec{};
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (j2 <= eps * eps) {
        eta = {0.0, 0.0, 0.0};
        vec = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    } else {
        const double j3 = det(dev);
        const double s = std::sqrt(j2 / 3.0);
        const double cos3a = std::clamp(0.5 * j3 / (s * s * s), -1.0, 1.0);
        const double alpha = std::acos(cos3a) / 3.0;
        constexpr double pi = std::numbers::pi;
        // Pick the eigenvalue farthest from the other two.
        double eta1 = alpha < pi / 6.0 ? 2.0 * s * std::cos(alpha) : 2.0 * s * std::cos(alpha + 2.0 * pi / 3.0);

        const Tensor3 m = dev.to_matrix();
        Vec3 u1, u2;
        const Vec3 v1 = simple_eigenvector(m, eta1, u1, u2);
        eta1 = v1.dot(m * v1);

        // Exact 2×2 problem on span{u1, u2}.
        const double a11 = u1.dot(m * u1);
        const double a22 = u2.dot(m * u2);
        const double a12 = u1.dot(m * u2);
        const double half_sum = 0.5 * (a11 + a22);
        const double rad = std::hypot(0.5 * (a11 - a22), a12);
        const double eta2 = half_sum + rad;
        const double eta3 = half_sum - rad;

        Tensor3 r = m;
        r.diagonal().array() -= eta2;
        const Vec3 w1 = r * u1;
        const Vec3 w2 = r * u2;
        const Vec3& w = w1.norm() >= w2.norm() ? w1 : w2;
        Vec3 v2;
        if (w.norm() <= 4.0 * eps) {
            v2 = u1;
        } else {
            v2 = v1.cross(w).normalized();
        }
        const Vec3 v3 = v1.cross(v2).normalized();
        eta = {eta1, eta2, eta3};
        vec = {v1, v2, v3};
    }

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return eta[i] > eta[j]; });
    for (int k = 0; k < 3; ++k) {
        out.values[k] = (eta[order[k]] + mean) * scale;
        out.vectors[k] = vec[order[k]];
    }
    // Keep a right-handed triad.
    if (out.vectors[0].cross(out.vectors[1]).dot(out.vectors[2]) < 0.0) out.vectors[2] = -out.vectors[2];

    const double tol = out.coincidence_tolerance;
    const bool c01 = out.values[0] - out.values[1] <= tol;
    const bool c12 = out.values[1] - out.values[2] <= tol;
    if (c01 && c12) {
        out.multiplicity = Multiplicity::all_coincident;
    } else if (c01 || c12) {
        out.multiplicity = Multiplicity::two_coincident;
    } else {
        out.multiplicity = Multiplicity::distinct;
    }
    return out;
}

}  // namespace incel
