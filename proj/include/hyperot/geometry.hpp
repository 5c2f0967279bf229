#pragma once

#include <functional>
#include <vector>

#include "hyperot/minkowski.hpp"

namespace hyperot {

// Geodesically convex polygon on the sheet, vertices counterclockwise.
// Edges are geodesic segments; in Klein coordinates they are straight
// chords, which the clipping and containment code relies on.
struct GeodesicPolygon {
    std::vector<HPoint> verts;

    bool empty() const { return verts.size() < 3; }
    double area() const;                       // angle-sum formula
    bool contains(const HPoint& p, double slack = 0.0) const;  // convex test
    HPoint centroid() const;                   // Lorentz-normalized area mean
};

// Keeps the side {<m, q>_H >= 0} of the plane through the origin with
// Minkowski normal m. Crossing points are the chord intersections
// renormalized onto the sheet.
GeodesicPolygon clip_halfplane(const GeodesicPolygon& poly, const Vec3m& m);

// Counterclockwise convex hull of the given points (monotone chain on
// Klein coordinates). Collinear inputs yield a polygon with < 3 vertices.
GeodesicPolygon convex_hull(const std::vector<HPoint>& pts);

// Integrates f over the geodesic triangle (a, b, c) against the
// hyperbolic area element. Degree-5 seven-point rule on the Klein chord
// triangle with the (1 - r^2)^(-3/2) density.
double integrate_triangle(const HPoint& a, const HPoint& b, const HPoint& c,
                          const std::function<double(const HPoint&)>& f);

// Same rule applied to a fan triangulation of a convex polygon.
double integrate_polygon(const GeodesicPolygon& poly,
                         const std::function<double(const HPoint&)>& f);

// Interior angle of the wedge (prev, at, next).
double interior_angle(const HPoint& prev, const HPoint& at, const HPoint& next);

// Distance from p to the geodesic segment [a, b].
double point_segment_distance(const HPoint& p, const HPoint& a, const HPoint& b);

// Signed sinh of the displacement of p along the unit tangent t based at q:
// positive when p lies on the +t side.
inline double sinh_signed_offset(const HPoint& q, const Vec3m& t, const HPoint& p) {
    (void)q;
    return lorentz_inner(p.vec(), t);
}

}  // namespace hyperot
