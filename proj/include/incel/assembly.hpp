#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "incel/algostress.hpp"
#include "incel/material.hpp"
#include "incel/spline.hpp"

namespace incel {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Boundary face {u_dir = side} of the parametric cube.
struct FaceId {
    int dir = 0;
    int side = 0;
    friend bool operator==(const FaceId&, const FaceId&) = default;
};

/// "x0", "x1", "y0", ... ; throws ConfigError otherwise.
FaceId parse_face(const std::string& name);
std::string to_string(FaceId f);

/// Quadrature data of one element: weights include det J, gradients are
/// taken with respect to the reference coordinates X.
struct ElementQuadrature {
    std::vector<int> vfun;
    std::vector<int> pfun;
    std::vector<double> weight;
    std::vector<Vec3> point;
    Eigen::MatrixXd nv;                  ///< nq × nv values
    std::vector<Eigen::Matrix3Xd> dnv;   ///< per point, 3 × nv reference gradients
    Eigen::MatrixXd np;                  ///< nq × np values
};

/// Quadrature data of one element face on a boundary face of the patch.
struct FaceQuadrature {
    int element = 0;
    std::vector<int> vfun;
    std::vector<double> weight;          ///< includes the surface Jacobian
    std::vector<Vec3> point;
    Eigen::MatrixXd nv;                  ///< nq × nv values
};

/// Geometry, mixed spaces and cached quadrature of a single patch.
class Discretization {
public:
    Discretization() = default;
    /// quad_points = 0 selects p + a + 2 Gauss points per direction.
    Discretization(Geometry geometry, MixedSpaces spaces, int quad_points = 0);

    const Geometry& geometry() const { return geometry_; }
    const MixedSpaces& spaces() const { return spaces_; }
    int quad_points() const { return nq_; }
    int n_vel() const { return spaces_.velocity.dimension(); }
    int n_pres() const { return spaces_.pressure.dimension(); }
    int elements() const { return static_cast<int>(elem_.size()); }

    const ElementQuadrature& element(int e) const { return elem_[e]; }
    const std::vector<FaceQuadrature>& face(FaceId f) const { return faces_[2 * f.dir + f.side]; }

    /// Reference volume by quadrature.
    double volume() const;

private:
    Geometry geometry_;
    MixedSpaces spaces_;
    int nq_ = 0;
    std::vector<ElementQuadrature> elem_;
    std::array<std::vector<FaceQuadrature>, 6> faces_;
};

/// Velocity components interleaved (3g + i), followed by the pressure
/// coefficients. Constrained velocity coefficients are excluded from the
/// linear system.
struct DofMap {
    int n_vel = 0;
    int n_pres = 0;
    std::vector<FaceId> clamped;
    std::vector<char> fixed;        ///< per velocity coefficient, length 3 n_vel
    std::vector<int> free_index;    ///< length 3 n_vel + n_pres, −1 when fixed
    int n_free_vel = 0;

    int n_free() const { return n_free_vel + n_pres; }
    static DofMap build(const Discretization& d, const std::vector<FaceId>& clamped_faces);
};

struct State {
    double t = 0.0;
    Vector U;
    Vector V;
    Vector P;

    static State zero(const Discretization& d);
};

/// c + a cos(ωt) + b sin(ωt).
struct Harmonic {
    Vec3 c = Vec3::Zero();
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    double omega = 0.0;

    Vec3 eval(double t) const;
    bool is_zero() const { return c.isZero(0.0) && a.isZero(0.0) && b.isZero(0.0); }
};

enum class BodyForceKind { none, constant, harmonic, rotational };
const char* to_string(BodyForceKind k);
BodyForceKind parse_body_force(const std::string& name);

/// Body force per unit mass. constant: B = c; harmonic: B = h(t);
/// rotational: B = h(t) × X. All are dead loads.
struct BodyForce {
    BodyForceKind kind = BodyForceKind::none;
    Harmonic h;

    Vec3 eval(const Vec3& x, double t) const;
};

/// Dead traction per unit reference area on a boundary face.
struct Traction {
    FaceId face;
    Harmonic h;
};

struct LoadSpec {
    BodyForce body;
    std::vector<Traction> tractions;
};

enum class TangentMode { analytic, finite_difference };

struct AssemblyOptions {
    double gamma = 0.0;
    StressFormula formula = StressFormula::gonzalez;
    double tol_b = kDefaultTolB;
    ElasticityVariant elasticity = ElasticityVariant::corrected;
    TangentMode tangent = TangentMode::analytic;
    /// OpenMP element loop; results are bitwise identical to the serial loop.
    bool parallel = true;
};

/// Momentum and mass residuals over all coefficients (constrained rows included).
struct Residual {
    Vector m;   ///< length 3 n_vel
    Vector p;   ///< length n_pres
};

/// Element loops for the residuals and the saddle-point matrix
///
///     [ A  B ]
///     [ C  0 ]
///
/// on the free coefficients (velocity first, then pressure). The sparsity
/// pattern is built once; assembly scatters into it in element order.
class Assembler {
public:
    Assembler(const Discretization& disc, const DofMap& dofs, const OgdenModel& model, const LoadSpec& loads);

    const Discretization& discretization() const { return disc_; }
    const DofMap& dofs() const { return dofs_; }
    const OgdenModel& model() const { return model_; }
    const LoadSpec& loads() const { return loads_; }

    Residual residual(const State& n, const State& np1, double dt, const AssemblyOptions& opt) const;
    /// Residual and matrix in one pass. K keeps the fixed pattern.
    void system(const State& n, const State& np1, double dt, const AssemblyOptions& opt, Residual& r,
                SparseMatrix& k) const;

    /// Empty matrix with the saddle-point sparsity pattern.
    const SparseMatrix& pattern() const { return pattern_; }

    /// Restriction of a full residual to the free coefficients, in system order.
    Vector free_residual(const Residual& r) const;

private:
    struct Work;
    void element(int e, const State& n, const State& np1, double dt, const AssemblyOptions& opt, bool with_matrix,
                 Work& w) const;
    void element_kernel(int e, const Eigen::Matrix3Xd& un, const Eigen::Matrix3Xd& vn, const Eigen::VectorXd& pn,
                        const Eigen::Matrix3Xd& u1, const Eigen::Matrix3Xd& v1, const Eigen::VectorXd& p1, double tm,
                        double dt, const AssemblyOptions& opt, bool with_matrix, Work& w) const;
    void add_tractions(const State& n, const State& np1, double dt, Residual& r) const;
    void run(const State& n, const State& np1, double dt, const AssemblyOptions& opt, Residual& r,
             SparseMatrix* k) const;

    const Discretization& disc_;
    const DofMap& dofs_;
    OgdenModel model_;
    LoadSpec loads_;
    SparseMatrix pattern_;
    /// Per element, position in pattern_.valuePtr() of every local (row, col)
    /// entry, column-major over the local dofs; −1 when not in the system.
    std::vector<std::vector<int>> scatter_;
};

/// (U_{n+1} − U_n)/Δt − (V_n + V_{n+1})/2.
Vector residual_kinematic(const State& n, const State& np1, double dt);

Vector residual_mass(const Assembler& a, const State& n, const State& np1);
Vector residual_momentum(const Assembler& a, const State& n, const State& np1, double dt, const AssemblyOptions& opt);

struct TangentBlocks {
    SparseMatrix A;   ///< free velocity × free velocity
    SparseMatrix B;   ///< free velocity × pressure
    SparseMatrix C;   ///< pressure × free velocity
};
TangentBlocks tangent_blocks(const Assembler& a, const State& n, const State& np1, double dt,
                             const AssemblyOptions& opt);

/// Values of a velocity-space coefficient field (3 × n_vel interleaved) at
/// quadrature point q of element e.
Vec3 field_value(const ElementQuadrature& eq, const Vector& coef, int q);
Tensor3 field_gradient(const ElementQuadrature& eq, const Vector& coef, int q);

}  // namespace incel
