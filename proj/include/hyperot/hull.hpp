#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hyperot/minkowski.hpp"

// Convex hull of radially lifted sites in 2+1 Minkowski space. A weighted
// site (center x, height phi) lifts to z = e^{-phi} x; the origin-facing
// boundary of the hull of the lifted points is dual to the power diagram,
// and its radial projection is the weighted Delaunay triangulation.
//
// Construction is incremental: each site is located by a straight walk in
// Klein coordinates, its conflict region is grown by the sign of the
// Lorentzian side-of-plane determinant, and the cavity is re-starred.
// Sites whose lifted point falls inside the current hull are hidden
// (their power cells are empty). Near-zero determinants are resolved by
// site index, lowest index winning.

namespace hyperot {

struct LiftedSite {
    HPoint center;
    double height = 0.0;  // phi; lifted radius rho = e^{-phi}
    double rho() const { return std::exp(-height); }
    Vec3m lifted() const { return center.vec() * rho(); }
};

class RegularTriangulation {
  public:
    static constexpr int kInfinite = -1;

    // Sites are inserted in vector order, or in `insertion_order` when
    // given. Predicate ties always break on the vector index.
    explicit RegularTriangulation(std::vector<LiftedSite> sites,
                                  const std::vector<int>& insertion_order = {});

    int site_count() const { return int(sites_.size()); }
    const LiftedSite& site(int i) const { return sites_[size_t(i)]; }
    bool hidden(int i) const { return hidden_[size_t(i)]; }

    struct Face {
        int v[3];  // site indices, counterclockwise seen from the origin
    };
    std::vector<Face> finite_faces() const;

    // Delaunay neighbors of a site in counterclockwise order, kInfinite
    // marking a hull gap. Empty for hidden sites.
    std::vector<int> neighbors(int site) const;

    // Triangle ring around a site: ids of incident triangles, ccw.
    std::vector<int> star(int site) const;

    bool tri_is_finite(int t) const { return tris_[size_t(t)].v[2] != kInfinite && tris_[size_t(t)].v[1] != kInfinite && tris_[size_t(t)].v[0] != kInfinite; }
    const std::array<int, 3> tri_vertices(int t) const {
        return {tris_[size_t(t)].v[0], tris_[size_t(t)].v[1], tris_[size_t(t)].v[2]};
    }

    // Inward unit normal of a finite face: the common solution of the
    // equal-support equations, normalized onto the future sheet.
    HPoint face_normal(int a, int b, int c) const;

  private:
    struct Tri {
        int v[3];
        int n[3];  // n[k]: neighbor across edge (v[k+1], v[k+2])
        bool alive = false;
    };

    void init_first_triangle();
    void insert(int s);
    int locate(int s, int hint) const;
    bool in_conflict(int tri, int s) const;
    bool finite_conflict(const Tri& t, int s) const;
    double orient(int a, int b, int c) const;
    int make_tri(int a, int b, int c);

    std::vector<LiftedSite> sites_;
    std::vector<Vec3m> lifted_;
    std::vector<DiskPoint> klein_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::vector<int> vert2tri_;
    std::vector<bool> hidden_;
    int hint_ = 0;
    mutable std::vector<uint32_t> conflict_epoch_;
    mutable std::vector<char> conflict_value_;
    mutable uint32_t epoch_ = 0;
};

// Snapshot view of the hull: lifted vertices, triangular faces with
// adjacency, and per-face inward unit normals.
struct ConvexHull {
    std::vector<LiftedSite> sites;
    std::vector<Vec3m> lifted;
    struct Face {
        int v[3];
        int nbr[3];  // adjacent face per edge, -1 on the hull rim
        // Inward unit normal; periphery faces whose support plane is not
        // spacelike have none (their cells meet beyond the ideal circle).
        bool has_normal = false;
        HPoint normal;
    };
    std::vector<Face> faces;
    std::vector<bool> hidden;
};

// Requires >= 3 sites with pairwise distinct centers (min distance 1e-9).
ConvexHull build_hull(const std::vector<LiftedSite>& sites);

// Sorting order with good insertion locality.
std::vector<int> hilbert_order(const std::vector<LiftedSite>& sites);

}  // namespace hyperot
