#include "hyperot/minkowski.hpp"

#include <cmath>

namespace hyperot {

HPoint HPoint::from_vec(const Vec3m& v) {
    double q = -lorentz_inner(v, v);
    if (!(q > 0.0) || v.x3 <= 0.0)
        throw geometry_error("vector is not future timelike");
    Vec3m n = v * (1.0 / std::sqrt(q));
    if (n.x3 > std::cosh(tol::max_distance))
        throw geometry_error("point beyond the supported range from the apex");
    return HPoint(n);
}

double hyperbolic_distance(const HPoint& x, const HPoint& y) {
    double c = -lorentz_inner(x.vec(), y.vec());
    if (c < 1.0) {
        if (c < 1.0 - tol::acosh_clamp)
            throw geometry_error("distance argument below 1: points not on the sheet");
        c = 1.0;
    }
    return std::acosh(c);
}

HPoint disk_to_hyperboloid(const DiskPoint& z) {
    double n2 = z.norm2();
    if (n2 >= 1.0)
        throw input_error("disk point outside the open unit disk");
    double d = 1.0 - n2;
    return HPoint::from_vec({2.0 * z.u / d, 2.0 * z.v / d, (1.0 + n2) / d});
}

DiskPoint hyperboloid_to_disk(const HPoint& p) {
    double d = 1.0 + p.x3();
    return {p.x1() / d, p.x2() / d};
}

HPoint klein_to_hyperboloid(double u, double v) {
    double n2 = u * u + v * v;
    if (n2 >= 1.0)
        throw input_error("klein point outside the open unit disk");
    double s = 1.0 / std::sqrt(1.0 - n2);
    return HPoint::unchecked({u * s, v * s, s});
}

LorentzIsometry::LorentzIsometry() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

LorentzIsometry LorentzIsometry::from_rows(const Vec3m& r0, const Vec3m& r1, const Vec3m& r2) {
    LorentzIsometry g;
    g.m_ = {{{r0.x1, r0.x2, r0.x3}, {r1.x1, r1.x2, r1.x3}, {r2.x1, r2.x2, r2.x3}}};
    return g;
}

LorentzIsometry LorentzIsometry::checked(const std::array<std::array<double, 3>, 3>& m,
                                         double eps) {
    LorentzIsometry g;
    g.m_ = m;
    if (g.orthogonality_defect() > eps)
        throw geometry_error("matrix does not preserve the Lorentzian inner product");
    if (g.m_[2][2] <= 0.0)
        throw geometry_error("matrix does not preserve the future cone");
    return g;
}

LorentzIsometry LorentzIsometry::unchecked(const std::array<std::array<double, 3>, 3>& m) {
    LorentzIsometry g;
    g.m_ = m;
    return g;
}

Vec3m LorentzIsometry::apply(const Vec3m& v) const {
    return {m_[0][0] * v.x1 + m_[0][1] * v.x2 + m_[0][2] * v.x3,
            m_[1][0] * v.x1 + m_[1][1] * v.x2 + m_[1][2] * v.x3,
            m_[2][0] * v.x1 + m_[2][1] * v.x2 + m_[2][2] * v.x3};
}

LorentzIsometry LorentzIsometry::compose(const LorentzIsometry& o) const {
    LorentzIsometry g;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m_[r][k] * o.m_[k][c];
            g.m_[r][c] = s;
        }
    return g;
}

LorentzIsometry LorentzIsometry::inverse() const {
    // G^-1 = J G^T J
    LorentzIsometry g;
    static const double J[3] = {1.0, 1.0, -1.0};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) g.m_[r][c] = J[r] * m_[c][r] * J[c];
    return g;
}

double LorentzIsometry::orthogonality_defect() const {
    static const double J[3] = {1.0, 1.0, -1.0};
    double worst = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m_[k][r] * J[k] * m_[k][c];
            double target = (r == c) ? J[r] : 0.0;
            worst = std::max(worst, std::abs(s - target));
        }
    return worst;
}

LorentzIsometry LorentzIsometry::reprojected() const {
    // G (3 I - J G^T J G) / 2
    static const double J[3] = {1.0, 1.0, -1.0};
    std::array<std::array<double, 3>, 3> q{};  // J G^T J G
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += J[r] * m_[k][r] * J[k] * m_[k][c];
            q[r][c] = s;
        }
    LorentzIsometry g;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                double t = (k == c) ? 3.0 - q[k][c] : -q[k][c];
                s += m_[r][k] * t * 0.5;
            }
            g.m_[r][c] = s;
        }
    return g;
}

double LorentzIsometry::max_diff(const LorentzIsometry& o) const {
    double worst = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(m_[r][c] - o.m_[r][c]));
    return worst;
}

static double angle_from_sides(double opposite, double b, double c) {
    double cosv = (std::cosh(b) * std::cosh(c) - std::cosh(opposite)) /
                  (std::sinh(b) * std::sinh(c));
    if (cosv > 1.0) cosv = 1.0;
    if (cosv < -1.0) cosv = -1.0;
    return std::acos(cosv);
}

double triangle_area(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw geometry_error("triangle sides must be positive");
    const double slack = 1e-12 * std::max(1.0, std::max(a, std::max(b, c)));
    if (a > b + c + slack || b > a + c + slack || c > a + b + slack)
        throw geometry_error("triangle inequality violated");
    double alpha = angle_from_sides(a, b, c);
    double beta = angle_from_sides(b, a, c);
    double gamma = angle_from_sides(c, a, b);
    double area = M_PI - alpha - beta - gamma;
    return area > 0.0 ? area : 0.0;
}

double saccheri_area(double base, double leg) {
    if (base < 0.0 || leg < 0.0)
        throw geometry_error("saccheri dimensions must be nonnegative");
    return base * std::sinh(leg);
}

Vec3m tangent_toward(const HPoint& p, const HPoint& q) {
    // Project q onto the tangent space at p and normalize.
    double ip = lorentz_inner(p.vec(), q.vec());
    Vec3m t = q.vec() + p.vec() * ip;
    double n2 = lorentz_inner(t, t);
    if (!(n2 > 0.0))
        throw geometry_error("tangent direction undefined for coincident points");
    return t * (1.0 / std::sqrt(n2));
}

HPoint geodesic_point(const HPoint& p, const Vec3m& t, double s) {
    return HPoint::from_vec(p.vec() * std::cosh(s) + t * std::sinh(s));
}

std::pair<HPoint, HPoint> circle_circle_intersection(const HPoint& c1, double r1,
                                                     const HPoint& c2, double r2) {
    double d = hyperbolic_distance(c1, c2);
    if (!(d > 0.0))
        throw geometry_error("circle centers coincide");

    // p = a c1 + b c2 + t n with n = c1 (x) c2. The two linear constraints
    // <p,c1> = -cosh r1 and <p,c2> = -cosh r2 fix (a, b); normalization
    // <p,p> = -1 fixes t up to sign.
    double g12 = lorentz_inner(c1.vec(), c2.vec());  // -cosh d
    double k1 = -std::cosh(r1), k2 = -std::cosh(r2);
    double det = 1.0 - g12 * g12;  // det of [[-1, g12],[g12, -1]] times -1
    // Solve [-1 g12; g12 -1] [a b]^T = [k1 k2]^T.
    double a = (-k1 - g12 * k2) / det;
    double b = (-k2 - g12 * k1) / det;

    Vec3m base = c1.vec() * a + c2.vec() * b;
    Vec3m n = lorentz_cross(c1.vec(), c2.vec());
    double nn = lorentz_inner(n, n);  // sinh^2 d > 0
    double bb = lorentz_inner(base, base);
    double t2 = (-1.0 - bb) / nn;
    double scale2 = std::max(std::abs(bb), 1.0);
    if (t2 <= 1e-12 / scale2)
        throw geometry_error("circles are tangent or do not intersect");
    double t = std::sqrt(t2);
    return {HPoint::from_vec(base + n * t), HPoint::from_vec(base - n * t)};
}

}  // namespace hyperot
