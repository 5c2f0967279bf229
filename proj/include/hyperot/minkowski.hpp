#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

// Primitives for the hyperboloid model of H^2 embedded in 2+1 Minkowski
// space with signature (+, +, -). All downstream geometry is built on
// these; the Poincare disk appears only at the I/O boundary.

namespace hyperot {

struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

namespace tol {
inline constexpr double sheet = 1e-10;        // |<p,p>+1| for points on the sheet
inline constexpr double isometry = 1e-10;     // |G^T J G - J| for isometries
inline constexpr double acosh_clamp = 1e-12;  // arcosh arguments in [1-eps, 1] clamp to 1
inline constexpr double max_distance = 20.0;  // range cap from the apex
}  // namespace tol

struct Vec3m {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;

    Vec3m operator+(const Vec3m& o) const { return {x1 + o.x1, x2 + o.x2, x3 + o.x3}; }
    Vec3m operator-(const Vec3m& o) const { return {x1 - o.x1, x2 - o.x2, x3 - o.x3}; }
    Vec3m operator*(double s) const { return {x1 * s, x2 * s, x3 * s}; }
    Vec3m operator-() const { return {-x1, -x2, -x3}; }

    double max_norm() const {
        return std::max(std::abs(x1), std::max(std::abs(x2), std::abs(x3)));
    }
};

inline Vec3m operator*(double s, const Vec3m& v) { return v * s; }

// <u,v>_H = u1 v1 + u2 v2 - u3 v3
inline double lorentz_inner(const Vec3m& u, const Vec3m& v) {
    return u.x1 * v.x1 + u.x2 * v.x2 - u.x3 * v.x3;
}

// Euclidean cross product, used internally by the Lorentzian one.
inline Vec3m euclid_cross(const Vec3m& u, const Vec3m& v) {
    return {u.x2 * v.x3 - u.x3 * v.x2, u.x3 * v.x1 - u.x1 * v.x3, u.x1 * v.x2 - u.x2 * v.x1};
}

// Lorentzian cross product u (x) v = J (u x v). The result is
// H-orthogonal to both inputs; e1 (x) e2 = (0,0,-1).
inline Vec3m lorentz_cross(const Vec3m& u, const Vec3m& v) {
    Vec3m c = euclid_cross(u, v);
    return {c.x1, c.x2, -c.x3};
}

// det[u v w] as columns; positive for triples that wind counterclockwise
// as seen from the origin along the future axis.
inline double triple_det(const Vec3m& u, const Vec3m& v, const Vec3m& w) {
    return u.x1 * (v.x2 * w.x3 - v.x3 * w.x2) - u.x2 * (v.x1 * w.x3 - v.x3 * w.x1) +
           u.x3 * (v.x1 * w.x2 - v.x2 * w.x1);
}

struct DiskPoint {
    double u = 0.0, v = 0.0;
    double norm2() const { return u * u + v * v; }
};

// A point on the future sheet {<p,p>_H = -1, x3 > 0}.
class HPoint {
  public:
    HPoint() : v_{0.0, 0.0, 1.0} {}

    // Normalizes a timelike future vector onto the sheet.
    static HPoint from_vec(const Vec3m& v);
    // Trusts the caller; only for vectors already on the sheet.
    static HPoint unchecked(const Vec3m& v) { return HPoint(v); }

    const Vec3m& vec() const { return v_; }
    double x1() const { return v_.x1; }
    double x2() const { return v_.x2; }
    double x3() const { return v_.x3; }

    bool on_sheet(double eps = tol::sheet) const {
        return std::abs(lorentz_inner(v_, v_) + 1.0) <= eps && v_.x3 > 0.0;
    }

  private:
    explicit HPoint(const Vec3m& v) : v_(v) {}
    Vec3m v_;
};

double hyperbolic_distance(const HPoint& x, const HPoint& y);

HPoint disk_to_hyperboloid(const DiskPoint& z);
DiskPoint hyperboloid_to_disk(const HPoint& p);

// Klein coordinates (x1/x3, x2/x3): geodesics become straight chords.
inline DiskPoint klein_of(const HPoint& p) { return {p.x1() / p.x3(), p.x2() / p.x3()}; }
HPoint klein_to_hyperboloid(double u, double v);

// 3x3 matrix G with G^T J G = J and G[3][3] > 0 (preserves the future cone).
class LorentzIsometry {
  public:
    LorentzIsometry();  // identity

    static LorentzIsometry from_rows(const Vec3m& r0, const Vec3m& r1, const Vec3m& r2);
    // Validates the isometry invariant before returning.
    static LorentzIsometry checked(const std::array<std::array<double, 3>, 3>& m,
                                   double eps = tol::isometry);
    static LorentzIsometry unchecked(const std::array<std::array<double, 3>, 3>& m);

    Vec3m apply(const Vec3m& v) const;
    HPoint apply(const HPoint& p) const { return HPoint::from_vec(apply(p.vec())); }
    HPoint operator()(const HPoint& p) const { return apply(p); }

    LorentzIsometry compose(const LorentzIsometry& o) const;  // this * o
    LorentzIsometry inverse() const;                          // J G^T J

    // Max-norm of G^T J G - J.
    double orthogonality_defect() const;
    // One Newton step of G <- G (3 I - J G^T J G) / 2 to pull a drifted
    // product back onto the group.
    LorentzIsometry reprojected() const;

    double entry(int r, int c) const { return m_[r][c]; }
    double max_diff(const LorentzIsometry& o) const;

  private:
    std::array<std::array<double, 3>, 3> m_;
};

double triangle_area(double a, double b, double c);
double saccheri_area(double base, double leg);

std::pair<HPoint, HPoint> circle_circle_intersection(const HPoint& c1, double r1,
                                                     const HPoint& c2, double r2);

// Unit tangent at p pointing toward q (requires p != q).
Vec3m tangent_toward(const HPoint& p, const HPoint& q);
// Geodesic flow: point at arc length s from p in unit tangent direction t.
HPoint geodesic_point(const HPoint& p, const Vec3m& t, double s);

}  // namespace hyperot
