#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperot/solver.hpp"

// Embedding of a cut-open triangulated hyperbolic surface as a fundamental
// domain, side-pairing generators of the deck group, finite tilings of the
// universal cover, and the surface-mode diagram factory built on them.

namespace hyperot {

struct MeshFace {
    int v[3];
};

struct BoundarySide {
    std::string label;       // "a1", "b1", "a1~", "b1~", ... in boundary order
    std::vector<int> verts;  // cut vertex ids along the side
};

struct MetricMesh {
    int vertex_count = 0;
    std::vector<MeshFace> faces;
    std::unordered_map<uint64_t, double> edge_lengths;
    int genus = 0;
    std::vector<BoundarySide> boundary;

    // Derived by finalize(): cut vertex -> surface vertex identification.
    std::vector<int> surface_vertex;
    int surface_vertex_count = 0;

    static uint64_t edge_key(int u, int v) {
        if (u > v) std::swap(u, v);
        return (uint64_t(uint32_t(u)) << 32) | uint64_t(uint32_t(v));
    }
    double edge_len(int u, int v) const;
    void set_edge_len(int u, int v, double l);
    void finalize();

    // Total angle-deficit area of the faces.
    double metric_area() const;
    // Hyperbolic area of one face from its edge lengths.
    double face_area(const MeshFace& f) const;
};

struct FundamentalDomain {
    std::vector<HPoint> tau;  // embedded position per cut vertex
    std::vector<std::vector<HPoint>> sides;  // boundary polylines, per side
    std::vector<HPoint> boundary_loop;       // closed boundary, ccw
    GeodesicPolygon corner_outline;          // corner ring
    // Set when every side polyline lies on its corner chord: boundary
    // queries then run on the 4g-gon instead of the full loop.
    bool straight_sides = false;

    bool contains(const HPoint& p, double slack = 1e-9) const;
    // 0 inside; otherwise distance to the boundary loop.
    double outside_distance(const HPoint& p) const;
};

FundamentalDomain embed_domain(const MetricMesh& mesh);

struct FuchsianGroup {
    int genus = 0;
    std::vector<LorentzIsometry> gens;  // alpha_1, beta_1, ..., alpha_g, beta_g
    std::vector<std::string> labels;

    // letter: +(i+1) for gens[i], -(i+1) for its inverse
    LorentzIsometry letter(int l) const;
    int alphabet_size() const { return 2 * int(gens.size()); }
};

FuchsianGroup side_pairing_generators(const MetricMesh& mesh, const FundamentalDomain& dom);

struct TileElement {
    LorentzIsometry g;
    std::vector<int> word;  // letters; empty for the identity
};

struct TilePatch {
    int depth = 0;
    std::vector<TileElement> elements;  // identity first
};

// Image of p under g when it stays within the numerically trustworthy
// range of the sheet; far translates cancel catastrophically.
std::optional<HPoint> apply_safe(const LorentzIsometry& g, const HPoint& p);

// Reduced words up to length L near the domain, deduplicated, identity
// first. No containment check.
TilePatch enumerate_tiles(const FuchsianGroup& group, const FundamentalDomain& dom, int length);

// enumerate_tiles plus the containment check: throws input_error when
// the closure of the domain is not interior to the union of tiles.
TilePatch build_tiling(const FuchsianGroup& group, const FundamentalDomain& dom, int length);

// Raises the word length until containment holds (hard cap 4).
TilePatch build_tiling_auto(const FuchsianGroup& group, const FundamentalDomain& dom,
                            int initial_length = 1);

HPoint covering_reduce(const TilePatch& patch, const FundamentalDomain& dom, const HPoint& x);

// Surface-mode diagram factory over the patch: canonical sites plus the
// translated copies within an adaptive collar, bounded by far guard sites.
class SurfaceDiagramFactory {
  public:
    SurfaceDiagramFactory(std::vector<HPoint> canonical, const FundamentalDomain& dom,
                          const TilePatch& patch, double total_area);

    DiagramBuild operator()(const std::vector<double>& heights) const;
    double total_area() const { return total_area_; }
    size_t size() const { return canonical_.size(); }

  private:
    struct Copy {
        int canonical;
        HPoint pos;
        double dist;  // distance from the closed domain
    };
    DiagramBuild build_once(const std::vector<double>& heights, double collar) const;

    std::vector<HPoint> canonical_;
    FundamentalDomain dom_;
    std::vector<Copy> copies_;
    double total_area_ = 0.0;
    double domain_radius_ = 0.0;  // max distance of the boundary from the apex
    double base_collar_ = 0.0;
    mutable double collar_hint_ = 0.0;
};

}  // namespace hyperot
