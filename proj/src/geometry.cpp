#include "hyperot/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hyperot {

double interior_angle(const HPoint& prev, const HPoint& at, const HPoint& next) {
    Vec3m u = tangent_toward(at, prev);
    Vec3m v = tangent_toward(at, next);
    double c = lorentz_inner(u, v);
    // sin component via the cross: (u (x) v) is parallel to at for tangent
    // vectors, with magnitude sin(angle).
    double s = -lorentz_inner(lorentz_cross(u, v), at.vec());
    return std::atan2(std::abs(s), c);
}

namespace {

// Near-coincident vertices (repeated clip crossings, dual vertices of
// cocircular faces) carry no angular information: the tangent between
// points separated by delta has direction noise eps/delta. Merging below
// 1e-8 changes the area by O(delta^2), far below the area tolerances.
std::vector<const HPoint*> distinct_ring(const std::vector<HPoint>& verts) {
    std::vector<const HPoint*> ring;
    for (const HPoint& v : verts) {
        if (!ring.empty() &&
            (v.vec() - ring.back()->vec()).max_norm() <= 1e-8 * std::max(1.0, v.x3()))
            continue;
        ring.push_back(&v);
    }
    while (ring.size() > 1 &&
           (ring.front()->vec() - ring.back()->vec()).max_norm() <=
               1e-8 * std::max(1.0, ring.front()->x3()))
        ring.pop_back();
    return ring;
}

}  // namespace

double GeodesicPolygon::area() const {
    std::vector<const HPoint*> ring = distinct_ring(verts);
    size_t n = ring.size();
    if (n < 3) return 0.0;
    double angle_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const HPoint& prev = *ring[(i + n - 1) % n];
        const HPoint& next = *ring[(i + 1) % n];
        angle_sum += interior_angle(prev, *ring[i], next);
    }
    double a = (double(n) - 2.0) * M_PI - angle_sum;
    return a > 0.0 ? a : 0.0;
}

bool GeodesicPolygon::contains(const HPoint& p, double slack) const {
    size_t n = verts.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Vec3m& a = verts[i].vec();
        const Vec3m& b = verts[(i + 1) % n].vec();
        if (triple_det(a, b, p.vec()) < -slack) return false;
    }
    return true;
}

GeodesicPolygon clip_halfplane(const GeodesicPolygon& poly, const Vec3m& m) {
    GeodesicPolygon out;
    size_t n = poly.verts.size();
    if (n == 0) return out;
    out.verts.reserve(n + 1);
    for (size_t i = 0; i < n; ++i) {
        const Vec3m& a = poly.verts[i].vec();
        const Vec3m& b = poly.verts[(i + 1) % n].vec();
        double fa = lorentz_inner(m, a);
        double fb = lorentz_inner(m, b);
        if (fa >= 0.0) out.verts.push_back(poly.verts[i]);
        if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
            double t = fa / (fa - fb);
            out.verts.push_back(HPoint::from_vec(a + (b - a) * t));
        }
    }
    if (out.verts.size() < 3) out.verts.clear();
    return out;
}

GeodesicPolygon convex_hull(const std::vector<HPoint>& pts) {
    std::vector<DiskPoint> k(pts.size());
    std::vector<size_t> idx(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        k[i] = klein_of(pts[i]);
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        if (k[a].u != k[b].u) return k[a].u < k[b].u;
        return k[a].v < k[b].v;
    });
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](size_t a, size_t b) {
                              return k[a].u == k[b].u && k[a].v == k[b].v;
                          }),
              idx.end());

    auto cross = [&](size_t o, size_t a, size_t b) {
        return (k[a].u - k[o].u) * (k[b].v - k[o].v) - (k[a].v - k[o].v) * (k[b].u - k[o].u);
    };

    size_t n = idx.size();
    GeodesicPolygon hull;
    if (n < 3) return hull;
    std::vector<size_t> h(2 * n);
    size_t m = 0;
    for (size_t i = 0; i < n; ++i) {
        while (m >= 2 && cross(h[m - 2], h[m - 1], idx[i]) <= 0) --m;
        h[m++] = idx[i];
    }
    for (size_t i = n - 1, lower = m + 1; i-- > 0;) {
        while (m >= lower && cross(h[m - 2], h[m - 1], idx[i]) <= 0) --m;
        h[m++] = idx[i];
    }
    h.resize(m - 1);
    hull.verts.reserve(h.size());
    for (size_t i : h) hull.verts.push_back(pts[i]);
    return hull;
}

double point_segment_distance(const HPoint& p, const HPoint& a, const HPoint& b) {
    Vec3m n = lorentz_cross(a.vec(), b.vec());
    double nn = lorentz_inner(n, n);
    if (nn > 0.0) {
        Vec3m nh = n * (1.0 / std::sqrt(nn));
        double off = lorentz_inner(p.vec(), nh);
        Vec3m foot_v = p.vec() - nh * off;
        if (-lorentz_inner(foot_v, foot_v) > 0.0) {
            HPoint foot = HPoint::from_vec(foot_v);
            double det_ab = triple_det(a.vec(), b.vec(), n);
            double wa = triple_det(foot.vec(), b.vec(), n) / det_ab;
            double wb = triple_det(a.vec(), foot.vec(), n) / det_ab;
            if (wa >= 0.0 && wb >= 0.0) return std::abs(std::asinh(off));
        }
    }
    return std::min(hyperbolic_distance(p, a), hyperbolic_distance(p, b));
}

namespace {

// Degree-5 seven-point symmetric rule on the reference triangle.
struct QuadNode {
    double l1, l2, l3, w;
};
const QuadNode kTri7[7] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.0597158717897698, 0.4701420641051151, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.0597158717897698, 0.4701420641051151, 0.1323941527885062},
    {0.4701420641051151, 0.4701420641051151, 0.0597158717897698, 0.1323941527885062},
    {0.7974269853530873, 0.1012865073234563, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.7974269853530873, 0.1012865073234563, 0.1259391805448271},
    {0.1012865073234563, 0.1012865073234563, 0.7974269853530873, 0.1259391805448271},
};

}  // namespace

double integrate_triangle(const HPoint& a, const HPoint& b, const HPoint& c,
                          const std::function<double(const HPoint&)>& f) {
    DiskPoint ka = klein_of(a), kb = klein_of(b), kc = klein_of(c);
    double euclid2 = (kb.u - ka.u) * (kc.v - ka.v) - (kb.v - ka.v) * (kc.u - ka.u);
    double acc = 0.0;
    for (const QuadNode& q : kTri7) {
        double u = q.l1 * ka.u + q.l2 * kb.u + q.l3 * kc.u;
        double v = q.l1 * ka.v + q.l2 * kb.v + q.l3 * kc.v;
        double r2 = u * u + v * v;
        double density = 1.0 / std::pow(1.0 - r2, 1.5);
        HPoint p = klein_to_hyperboloid(u, v);
        acc += q.w * f(p) * density;
    }
    return acc * std::abs(euclid2) * 0.5;
}

double integrate_polygon(const GeodesicPolygon& poly,
                         const std::function<double(const HPoint&)>& f) {
    double acc = 0.0;
    for (size_t i = 1; i + 1 < poly.verts.size(); ++i)
        acc += integrate_triangle(poly.verts[0], poly.verts[i], poly.verts[i + 1], f);
    return acc;
}

HPoint GeodesicPolygon::centroid() const {
    if (empty()) throw geometry_error("centroid of a degenerate polygon");
    // The moment integral of the position field over a geodesic polygon
    // reduces to its boundary: each edge contributes half its length
    // times the unit normal of its supporting plane. Exact and
    // independent of the vertex labeling.
    Vec3m acc{0, 0, 0};
    size_t n = verts.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec3m& a = verts[i].vec();
        const Vec3m& b = verts[(i + 1) % n].vec();
        Vec3m m = lorentz_cross(a, b);
        double mm = lorentz_inner(m, m);
        if (!(mm > 0.0)) continue;  // zero-length edge
        double len = hyperbolic_distance(verts[i], verts[(i + 1) % n]);
        acc = acc + m * (0.5 * len / std::sqrt(mm));
    }
    if (acc.x3 < 0.0) acc = -acc;
    return HPoint::from_vec(acc);
}

}  // namespace hyperot
