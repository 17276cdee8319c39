#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "incel/tensor3.hpp"

namespace incel {

/// Open knot vector on [0, 1].
class KnotVector {
public:
    KnotVector() = default;
    /// Validates openness, monotonicity and interior multiplicity <= degree.
    KnotVector(int degree, std::vector<double> knots);

    /// Uniform open knot vector with `elements` spans and the given interelement
    /// regularity (-1 <= regularity < degree).
    static KnotVector uniform(int degree, int elements, int regularity);

    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }
    int dimension() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

    /// Distinct break points; element e spans [breaks[e], breaks[e+1]].
    const std::vector<double>& breaks() const { return breaks_; }
    int elements() const { return static_cast<int>(breaks_.size()) - 1; }

    /// Minimum interelement regularity (degree − max interior multiplicity).
    int regularity() const;

    /// Knot span index s with knots[s] <= u < knots[s+1] (last non-empty span at u = 1).
    int find_span(double u) const;
    /// Span index of element e.
    int element_span(int e) const { return elem_span_[e]; }

    /// Values and first derivatives of the degree+1 functions that are nonzero
    /// on `span`; function k of the result is global function span − degree + k.
    void eval(int span, double u, double* values, double* derivs) const;

    friend bool operator==(const KnotVector&, const KnotVector&) = default;

private:
    int degree_ = 0;
    std::vector<double> knots_;
    std::vector<double> breaks_;
    std::vector<int> elem_span_;
};

/// Values and parametric gradients of the nonzero functions of a tensor space at
/// one point.
struct BasisValues {
    std::vector<int> index;
    std::vector<double> value;
    std::vector<Vec3> grad;
};

/// Trivariate tensor-product B-spline or NURBS space. Global function index is
/// i + n0 (j + n1 k).
class TensorSpace {
public:
    TensorSpace() = default;
    explicit TensorSpace(std::array<KnotVector, 3> kv, std::vector<double> weights = {});

    const KnotVector& knots(int d) const { return kv_[d]; }
    int dimension(int d) const { return kv_[d].dimension(); }
    int dimension() const { return dimension(0) * dimension(1) * dimension(2); }
    int elements(int d) const { return kv_[d].elements(); }
    int elements() const { return elements(0) * elements(1) * elements(2); }
    /// Number of nonzero functions per element.
    int local_dimension() const;
    bool rational() const { return !weights_.empty(); }
    const std::vector<double>& weights() const { return weights_; }

    int index(int i, int j, int k) const { return i + dimension(0) * (j + dimension(1) * k); }
    std::array<int, 3> multi_index(int g) const;
    /// Element e = e0 + E0 (e1 + E1 e2).
    std::array<int, 3> element_multi_index(int e) const;

    /// Global indices of the functions supported on element e, in the same
    /// order as eval_element.
    std::vector<int> element_functions(int e) const;

    /// Evaluation at parametric point u inside element e (u need not be
    /// strictly interior).
    void eval_element(int e, const Vec3& u, BasisValues& out) const;
    /// Evaluation at an arbitrary parametric point in [0,1]³.
    BasisValues eval(const Vec3& u) const;

    /// Functions that do not vanish on the face {u_d = side} (side 0 or 1).
    std::vector<int> face_functions(int d, int side) const;

private:
    void eval_spans(const std::array<int, 3>& span, const Vec3& u, BasisValues& out) const;

    std::array<KnotVector, 3> kv_;
    std::vector<double> weights_;
};

/// Generalized Taylor–Hood pair: pressure of degree p and regularity p−1,
/// velocity/displacement of degree p+a and regularity p−1+b.
struct MixedSpaces {
    int p = 1;
    int a = 1;
    int b = 0;
    TensorSpace velocity;
    TensorSpace pressure;
};

/// Throws ConfigError unless p >= 1, a >= 1, 0 <= b < a and every element count >= 1.
MixedSpaces build_mixed_spaces(int p, int a, int b, const std::array<int, 3>& elements);

/// Geometry map ψ from the parametric cube to the reference domain, given by
/// a tensor space and its control points.
class Geometry {
public:
    Geometry() = default;
    Geometry(TensorSpace space, std::vector<Vec3> control_points);

    /// Trilinear single-element map onto the box [lo, hi].
    static Geometry box(const Vec3& lo, const Vec3& hi);

    const TensorSpace& space() const { return space_; }
    const std::vector<Vec3>& control_points() const { return points_; }

    /// X(u) and J = ∂X/∂u (column d is ∂X/∂u_d). Throws MeshError when det J <= 0.
    Vec3 map(const Vec3& u, Tensor3* jacobian = nullptr) const;

    /// True when every control point of a degree-1 single-element map sits on
    /// the corners of an axis-aligned box.
    bool is_box() const;
    /// Lower and upper corners of the control net's bounding box.
    std::pair<Vec3, Vec3> bounds() const;

private:
    TensorSpace space_;
    std::vector<Vec3> points_;
};

/// Reads a single-patch description:
///
///     degree p0 p1 p2
///     knots0 k k k ...
///     knots1 k k k ...
///     knots2 k k k ...
///     points N
///     x y z [w]        (N rows, first parametric index fastest)
///
/// '#' starts a comment. Weights are optional but must be given for all rows
/// or none. Throws ConfigError with the offending line number.
Geometry read_patch(std::istream& in);
Geometry read_patch_file(const std::string& path);

/// Gauss–Legendre rule with n points on [0, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n);

}  // namespace incel
