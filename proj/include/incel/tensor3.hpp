#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace incel {

using Vec3 = Eigen::Vector3d;
using Tensor3 = Eigen::Matrix3d;

/// Six-component Voigt vector, ordering (11, 22, 33, 12, 13, 23).
using Voigt6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Symmetric second-order tensor in 3D. Only the six independent components
/// are stored, in Voigt order (11, 22, 33, 12, 13, 23).
class SymTensor3 {
public:
    SymTensor3() = default;
    SymTensor3(double a11, double a22, double a33, double a12, double a13, double a23)
        : c_{a11, a22, a33, a12, a13, a23} {}

    static SymTensor3 identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }
    static SymTensor3 zero() { return {}; }

    /// (A + Aᵀ)/2.
    static SymTensor3 from_matrix(const Tensor3& a);
    /// FᵀF, computed componentwise so the result is exactly symmetric.
    static SymTensor3 right_cauchy_green(const Tensor3& f);
    /// n ⊗ n.
    static SymTensor3 outer(const Vec3& n);
    /// Inverse of stress_voigt().
    static SymTensor3 from_stress_voigt(const Voigt6& v);

    double operator()(int i, int j) const { return c_[index(i, j)]; }
    double& operator()(int i, int j) { return c_[index(i, j)]; }
    double operator[](int k) const { return c_[k]; }
    double& operator[](int k) { return c_[k]; }

    const std::array<double, 6>& components() const { return c_; }

    Tensor3 to_matrix() const;
    /// Components in Voigt order without shear factors.
    Voigt6 stress_voigt() const;
    /// Components in Voigt order with shear entries doubled, so that
    /// a.stress_voigt().dot(b.strain_voigt()) == ddot(a, b).
    Voigt6 strain_voigt() const;

    double trace() const { return c_[0] + c_[1] + c_[2]; }
    bool all_finite() const;

    SymTensor3& operator+=(const SymTensor3& o);
    SymTensor3& operator-=(const SymTensor3& o);
    SymTensor3& operator*=(double s);

    friend SymTensor3 operator+(SymTensor3 a, const SymTensor3& b) { return a += b; }
    friend SymTensor3 operator-(SymTensor3 a, const SymTensor3& b) { return a -= b; }
    friend SymTensor3 operator*(SymTensor3 a, double s) { return a *= s; }
    friend SymTensor3 operator*(double s, SymTensor3 a) { return a *= s; }
    friend SymTensor3 operator-(SymTensor3 a) { return a *= -1.0; }
    friend bool operator==(const SymTensor3&, const SymTensor3&) = default;

    static constexpr int index(int i, int j)
    {
        constexpr int map[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
        return map[i][j];
    }

private:
    std::array<double, 6> c_{};
};

/// A : B.
double ddot(const SymTensor3& a, const SymTensor3& b);
/// Frobenius norm (A : A)^{1/2}.
double norm(const SymTensor3& a);
double det(const SymTensor3& a);
double det(const Tensor3& a);

/// Inverse; throws NumericalError when |det| <= 1e-300 * ‖A‖³.
SymTensor3 inverse(const SymTensor3& a);
Tensor3 inverse(const Tensor3& a);

/// Cofactor matrix det(A) A⁻ᵀ, defined for singular A as well.
Tensor3 cofactor(const Tensor3& a);

/// Action of the projection P = I − (1/3) C⁻¹ ⊗ C on T, i.e. T − (1/3)(C:T) C⁻¹.
SymTensor3 dev_projection(const SymTensor3& c, const SymTensor3& t);

enum class Multiplicity { distinct, two_coincident, all_coincident };

const char* to_string(Multiplicity m);

/// Eigen-decomposition of a symmetric 3×3 tensor, eigenvalues sorted descending.
struct SpectralDecomp {
    std::array<double, 3> values{};
    std::array<Vec3, 3> vectors{};
    Multiplicity multiplicity = Multiplicity::distinct;
    /// Absolute tolerance used for the multiplicity classification.
    double coincidence_tolerance = 0.0;

    SymTensor3 reconstruct() const;
};

/// Scherzinger–Dohrmann eigensolver for symmetric 3×3 tensors.
///
/// The most distinct eigenvalue of the deviator is taken from the trigonometric
/// closed form, its eigenvector from the cross product of the two best
/// conditioned columns of (A − ηI), and the remaining pair from the exact 2×2
/// problem on the orthogonal complement. Repeated eigenvalues are never
/// perturbed. Throws NumericalError for non-finite input.
SpectralDecomp sym_eigen(const SymTensor3& a);

}  // namespace incel
