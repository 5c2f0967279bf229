#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "hyperot/geometry.hpp"
#include "hyperot/hull.hpp"

namespace hyperot {

// Weighted site: geodesic circle (center, radius). Height phi = ln cosh r
// and radial length rho = e^{-phi} = 1/cosh r tie circles to lifted sites.
struct GeodesicCircle {
    HPoint center;
    double radius = 0.0;

    double height() const { return std::log(std::cosh(radius)); }
    double rho() const { return 1.0 / std::cosh(radius); }
    LiftedSite lifted() const { return {center, height()}; }

    // Requires phi >= 0; the diagram itself is invariant under common
    // height shifts, so raw height vectors are normalized before use.
    static GeodesicCircle from_height(const HPoint& center, double phi);
};

// cosh of the power distance from q to the circle.
double power_distance(const HPoint& q, const GeodesicCircle& c);

// Shift-covariant surrogate used for comparisons with raw heights.
inline double power_value(const HPoint& q, const HPoint& center, double height) {
    return -lorentz_inner(q.vec(), center.vec()) * std::exp(-height);
}

struct PowerCenter {
    HPoint center;
    double cosh_radius = 1.0;
};

// Equal-power point of a weighted triangle.
PowerCenter power_center(const GeodesicCircle& a, const GeodesicCircle& b,
                         const GeodesicCircle& c);

// Inward unit normal of the lifted face through three sites.
HPoint dual_vertex(const LiftedSite& a, const LiftedSite& b, const LiftedSite& c);

struct PowerCell {
    int site = -1;
    bool degenerate = false;
    GeodesicPolygon poly;
    // Per polygon edge (verts[e] -> verts[e+1]): index of the site across
    // the edge, or -1 for a domain-boundary edge.
    std::vector<int> edge_neighbor;
};

struct PowerDiagram {
    std::vector<LiftedSite> sites;   // includes translated copies in surface mode
    std::vector<int> canonical;      // canonical site per entry
    std::vector<PowerCell> cells;    // one per canonical site
    double domain_area = 0.0;
};

struct WeightedDelaunay {
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::pair<int, int>> edges;
};

struct DiagramPair {
    PowerDiagram diagram;
    WeightedDelaunay delaunay;
};

// Planar diagram clipped to a geodesically convex domain (defaults to the
// convex hull of the centers).
DiagramPair build_power_diagram(const std::vector<GeodesicCircle>& circles,
                                const std::optional<GeodesicPolygon>& domain = std::nullopt);

// Raw-height planar variant used by the solver.
DiagramPair build_planar_diagram(const std::vector<HPoint>& centers,
                                 const std::vector<double>& heights,
                                 const GeodesicPolygon& domain);

// Cell measure vector; zero for degenerate cells.
std::vector<double> cell_areas(const PowerDiagram& d);

struct HessianEdgeGeometry {
    double gamma_i = 0.0;  // signed distance from site i to the bisector foot
    double gamma_j = 0.0;  // signed distance from site j to the foot
    double d_k = 0.0;      // signed sub-lengths of the shared edge at the foot
    double d_l = 0.0;
};

HessianEdgeGeometry hessian_edge_geometry(const HPoint& xi, double phi_i, const HPoint& xj,
                                          double phi_j, const HPoint& edge_a,
                                          const HPoint& edge_b);

// d(omega_j)/d(phi_i) for a shared edge, from the edge geometry.
inline double hessian_edge_value(const HessianEdgeGeometry& g) {
    return -(std::sinh(g.d_k) + std::sinh(g.d_l)) / (std::tanh(g.gamma_i) + std::tanh(g.gamma_j));
}

// Brute-force owner of q: argmin power value, lowest index on ties.
int classify(const HPoint& q, const std::vector<HPoint>& centers,
             const std::vector<double>& heights);

}  // namespace hyperot
