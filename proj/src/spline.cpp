#include "incel/spline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "incel/error.hpp"

namespace incel {

namespace {

constexpr int kMaxDegree = 12;

}  // namespace

KnotVector::KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots))
{
    if (degree_ < 0 || degree_ > kMaxDegree) {
        throw ConfigError("spline degree must be in [0, " + std::to_string(kMaxDegree) + "]");
    }
    const int n = static_cast<int>(knots_.size());
    if (n < 2 * (degree_ + 1)) throw ConfigError("knot vector too short for degree " + std::to_string(degree_));
    for (int i = 1; i < n; ++i) {
        if (!(knots_[i] >= knots_[i - 1])) throw ConfigError("knot vector is not non-decreasing");
    }
    for (int i = 0; i <= degree_; ++i) {
        if (knots_[i] != 0.0 || knots_[n - 1 - i] != 1.0) {
            throw ConfigError("knot vector must be open on [0, 1] (end knots repeated degree+1 times)");
        }
    }
    for (int i = degree_ + 1; i < n - degree_ - 1;) {
        int mult = 1;
        while (i + mult < n - degree_ - 1 && knots_[i + mult] == knots_[i]) ++mult;
        if (mult > degree_) throw ConfigError("interior knot multiplicity exceeds the degree");
        i += mult;
    }
    for (int s = degree_; s < n - degree_ - 1; ++s) {
        if (knots_[s + 1] > knots_[s]) {
            elem_span_.push_back(s);
            breaks_.push_back(knots_[s]);
        }
    }
    breaks_.push_back(1.0);
}

KnotVector KnotVector::uniform(int degree, int elements, int regularity)
{
    if (elements < 1) throw ConfigError("number of elements must be positive");
    if (regularity < 0 || (regularity >= degree && elements > 1)) {
        throw ConfigError("regularity must satisfy 0 <= r < degree");
    }
    std::vector<double> k(degree + 1, 0.0);
    const int mult = degree - regularity;
    for (int e = 1; e < elements; ++e) {
        for (int m = 0; m < mult; ++m) k.push_back(static_cast<double>(e) / elements);
    }
    k.insert(k.end(), degree + 1, 1.0);
    return KnotVector(degree, std::move(k));
}

int KnotVector::regularity() const
{
    int max_mult = 0;
    const int n = static_cast<int>(knots_.size());
    for (int i = degree_ + 1; i < n - degree_ - 1;) {
        int mult = 1;
        while (i + mult < n - degree_ - 1 && knots_[i + mult] == knots_[i]) ++mult;
        max_mult = std::max(max_mult, mult);
        i += mult;
    }
    return max_mult == 0 ? degree_ : degree_ - max_mult;
}

int KnotVector::find_span(double u) const
{
    if (!(u >= 0.0 && u <= 1.0)) {
        throw Error("parametric coordinate " + std::to_string(u) + " outside [0, 1]");
    }
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end() - 1, u);
    const int e = std::max(0, static_cast<int>(it - breaks_.begin()) - 1);
    return elem_span_[std::min(e, elements() - 1)];
}

void KnotVector::eval(int span, double u, double* values, double* derivs) const
{
    const int p = degree_;
    const auto& kn = knots_;
    double ndu[kMaxDegree + 1][kMaxDegree + 1];
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - kn[span + 1 - j];
        right[j] = kn[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int r = 0; r <= p; ++r) values[r] = ndu[r][p];
    if (!derivs) return;
    if (p == 0) {
        derivs[0] = 0.0;
        return;
    }
    for (int r = 0; r <= p; ++r) {
        double d = 0.0;
        if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
        if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
        derivs[r] = p * d;
    }
}

TensorSpace::TensorSpace(std::array<KnotVector, 3> kv, std::vector<double> weights)
    : kv_(std::move(kv)), weights_(std::move(weights))
{
    if (!weights_.empty()) {
        if (static_cast<int>(weights_.size()) != dimension()) throw ConfigError("weight count does not match the space");
        for (double w : weights_) {
            if (!(w > 0.0)) throw ConfigError("NURBS weights must be positive");
        }
    }
}

int TensorSpace::local_dimension() const
{
    return (kv_[0].degree() + 1) * (kv_[1].degree() + 1) * (kv_[2].degree() + 1);
}

std::array<int, 3> TensorSpace::multi_index(int g) const
{
    const int n0 = dimension(0), n1 = dimension(1);
    return {g % n0, (g / n0) % n1, g / (n0 * n1)};
}

std::array<int, 3> TensorSpace::element_multi_index(int e) const
{
    const int e0 = elements(0), e1 = elements(1);
    return {e % e0, (e / e0) % e1, e / (e0 * e1)};
}

std::vector<int> TensorSpace::element_functions(int e) const
{
    const auto em = element_multi_index(e);
    std::array<int, 3> first{};
    for (int d = 0; d < 3; ++d) first[d] = kv_[d].element_span(em[d]) - kv_[d].degree();
    std::vector<int> out;
    out.reserve(local_dimension());
    for (int k = 0; k <= kv_[2].degree(); ++k) {
        for (int j = 0; j <= kv_[1].degree(); ++j) {
            for (int i = 0; i <= kv_[0].degree(); ++i) out.push_back(index(first[0] + i, first[1] + j, first[2] + k));
        }
    }
    return out;
}

void TensorSpace::eval_spans(const std::array<int, 3>& span, const Vec3& u, BasisValues& out) const
{
    double v[3][kMaxDegree + 1], dv[3][kMaxDegree + 1];
    for (int d = 0; d < 3; ++d) kv_[d].eval(span[d], u[d], v[d], dv[d]);
    const int p0 = kv_[0].degree(), p1 = kv_[1].degree(), p2 = kv_[2].degree();
    const int nloc = local_dimension();
    out.index.resize(nloc);
    out.value.resize(nloc);
    out.grad.resize(nloc);
    int l = 0;
    for (int k = 0; k <= p2; ++k) {
        for (int j = 0; j <= p1; ++j) {
            for (int i = 0; i <= p0; ++i, ++l) {
                out.index[l] = index(span[0] - p0 + i, span[1] - p1 + j, span[2] - p2 + k);
                out.value[l] = v[0][i] * v[1][j] * v[2][k];
                out.grad[l] = Vec3(dv[0][i] * v[1][j] * v[2][k], v[0][i] * dv[1][j] * v[2][k], v[0][i] * v[1][j] * dv[2][k]);
            }
        }
    }
    if (!rational()) return;
    double w = 0.0;
    Vec3 dw = Vec3::Zero();
    for (int a = 0; a < nloc; ++a) {
        const double wa = weights_[out.index[a]];
        out.value[a] *= wa;
        out.grad[a] *= wa;
        w += out.value[a];
        dw += out.grad[a];
    }
    for (int a = 0; a < nloc; ++a) {
        out.value[a] /= w;
        out.grad[a] = (out.grad[a] - out.value[a] * dw) / w;
    }
}

void TensorSpace::eval_element(int e, const Vec3& u, BasisValues& out) const
{
    const auto em = element_multi_index(e);
    eval_spans({kv_[0].element_span(em[0]), kv_[1].element_span(em[1]), kv_[2].element_span(em[2])}, u, out);
}

BasisValues TensorSpace::eval(const Vec3& u) const
{
    BasisValues out;
    eval_spans({kv_[0].find_span(u[0]), kv_[1].find_span(u[1]), kv_[2].find_span(u[2])}, u, out);
    return out;
}

std::vector<int> TensorSpace::face_functions(int d, int side) const
{
    std::vector<int> out;
    const int fixed = side == 0 ? 0 : dimension(d) - 1;
    for (int g = 0; g < dimension(); ++g) {
        if (multi_index(g)[d] == fixed) out.push_back(g);
    }
    return out;
}

MixedSpaces build_mixed_spaces(int p, int a, int b, const std::array<int, 3>& elements)
{
    if (p < 1) throw ConfigError("pressure degree p must be at least 1");
    if (a < 1) throw ConfigError("degree elevation a must be at least 1");
    if (b < 0 || b >= a) throw ConfigError("regularity increase b must satisfy 0 <= b < a");
    for (int n : elements) {
        if (n < 1) throw ConfigError("element counts must be positive");
    }
    MixedSpaces ms;
    ms.p = p;
    ms.a = a;
    ms.b = b;
    std::array<KnotVector, 3> kp, kv;
    for (int d = 0; d < 3; ++d) {
        kp[d] = KnotVector::uniform(p, elements[d], p - 1);
        kv[d] = KnotVector::uniform(p + a, elements[d], p - 1 + b);
    }
    ms.pressure = TensorSpace(kp);
    ms.velocity = TensorSpace(kv);
    return ms;
}

Geometry::Geometry(TensorSpace space, std::vector<Vec3> control_points)
    : space_(std::move(space)), points_(std::move(control_points))
{
    if (static_cast<int>(points_.size()) != space_.dimension()) {
        throw ConfigError("control point count " + std::to_string(points_.size()) + " does not match the space dimension " +
                          std::to_string(space_.dimension()));
    }
}

Geometry Geometry::box(const Vec3& lo, const Vec3& hi)
{
    if (!((hi - lo).minCoeff() > 0.0)) throw MeshError("box geometry needs hi > lo in every direction");
    const KnotVector lin(1, {0.0, 0.0, 1.0, 1.0});
    std::vector<Vec3> pts;
    for (int k = 0; k < 2; ++k) {
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) {
                pts.emplace_back(i ? hi[0] : lo[0], j ? hi[1] : lo[1], k ? hi[2] : lo[2]);
            }
        }
    }
    return Geometry(TensorSpace({lin, lin, lin}), std::move(pts));
}

Vec3 Geometry::map(const Vec3& u, Tensor3* jacobian) const
{
    const BasisValues b = space_.eval(u);
    Vec3 x = Vec3::Zero();
    Tensor3 j = Tensor3::Zero();
    for (std::size_t a = 0; a < b.index.size(); ++a) {
        const Vec3& p = points_[b.index[a]];
        x += b.value[a] * p;
        j += p * b.grad[a].transpose();
    }
    if (jacobian) {
        if (!(det(j) > 0.0)) {
            std::ostringstream os;
            os << "non-positive geometry Jacobian " << det(j) << " at (" << u[0] << ", " << u[1] << ", " << u[2] << ")";
            throw MeshError(os.str());
        }
        *jacobian = j;
    }
    return x;
}

std::pair<Vec3, Vec3> Geometry::bounds() const
{
    Vec3 lo = points_.front(), hi = points_.front();
    for (const auto& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

bool Geometry::is_box() const
{
    if (space_.rational() || space_.dimension() != 8) return false;
    for (int d = 0; d < 3; ++d) {
        if (space_.knots(d).degree() != 1) return false;
    }
    const auto [lo, hi] = bounds();
    for (int g = 0; g < 8; ++g) {
        const auto m = space_.multi_index(g);
        for (int d = 0; d < 3; ++d) {
            if (points_[g][d] != (m[d] ? hi[d] : lo[d])) return false;
        }
    }
    return true;
}

Geometry read_patch(std::istream& in)
{
    std::array<int, 3> degree{-1, -1, -1};
    std::array<std::vector<double>, 3> knots;
    std::array<bool, 3> have_knots{false, false, false};
    std::vector<Vec3> points;
    std::vector<double> weights;
    int expected = -1;
    int weighted = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        if (expected >= 0 && static_cast<int>(points.size()) < expected) {
            std::vector<double> row;
            double v;
            while (ls >> v) row.push_back(v);
            if (!ls.eof()) throw ConfigError("malformed control point row", lineno);
            if (row.empty()) continue;
            if (row.size() != 3 && row.size() != 4) throw ConfigError("control point row needs 3 or 4 numbers", lineno);
            const int w = row.size() == 4;
            if (weighted >= 0 && w != weighted) throw ConfigError("weights must be given for all rows or none", lineno);
            weighted = w;
            points.emplace_back(row[0], row[1], row[2]);
            if (w) weights.push_back(row[3]);
            continue;
        }
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "degree") {
            if (!(ls >> degree[0] >> degree[1] >> degree[2])) throw ConfigError("degree needs three integers", lineno);
        } else if (key == "knots0" || key == "knots1" || key == "knots2") {
            const int d = key.back() - '0';
            double v;
            while (ls >> v) knots[d].push_back(v);
            if (!ls.eof()) throw ConfigError("malformed knot value", lineno);
            have_knots[d] = true;
        } else if (key == "points") {
            if (!(ls >> expected) || expected <= 0) throw ConfigError("points needs a positive count", lineno);
        } else {
            throw ConfigError("unknown patch keyword '" + key + "'", lineno);
        }
    }
    for (int d = 0; d < 3; ++d) {
        if (degree[d] < 0) throw ConfigError("patch is missing 'degree'");
        if (!have_knots[d]) throw ConfigError("patch is missing knots" + std::to_string(d));
    }
    if (expected < 0 || static_cast<int>(points.size()) != expected) {
        throw ConfigError("patch declares " + std::to_string(expected) + " points but lists " + std::to_string(points.size()));
    }
    std::array<KnotVector, 3> kv;
    for (int d = 0; d < 3; ++d) kv[d] = KnotVector(degree[d], knots[d]);
    return Geometry(TensorSpace(kv, weights), std::move(points));
}

Geometry read_patch_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open patch file '" + path + "'");
    return read_patch(f);
}

QuadratureRule gauss_legendre(int n)
{
    if (n < 1) throw ConfigError("quadrature needs at least one point");
    QuadratureRule q;
    q.points.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Map from [-1, 1] to [0, 1], ascending.
        q.points[n - 1 - i] = 0.5 * (x + 1.0);
        q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

}  // namespace incel
