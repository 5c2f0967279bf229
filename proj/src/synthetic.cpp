#include "hyperot/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "hyperot/hull.hpp"

namespace hyperot {

std::vector<DiskPoint> hex_disk_sites(int rings, double outer_radius) {
    std::vector<DiskPoint> pts;
    pts.push_back({0.0, 0.0});
    double s = outer_radius / rings;
    for (int k = 1; k <= rings; ++k) {
        for (int sector = 0; sector < 6; ++sector) {
            double a0 = M_PI / 3.0 * sector;
            double a1 = M_PI / 3.0 * (sector + 1);
            DiskPoint c0{std::cos(a0) * k * s, std::sin(a0) * k * s};
            DiskPoint c1{std::cos(a1) * k * s, std::sin(a1) * k * s};
            for (int t = 0; t < k; ++t) {
                double f = double(t) / k;
                pts.push_back({c0.u + f * (c1.u - c0.u), c0.v + f * (c1.v - c0.v)});
            }
        }
    }
    return pts;
}

std::vector<HPoint> regular_fundamental_polygon(int genus) {
    if (genus < 2) throw input_error("genus must be at least 2");
    int n = 4 * genus;
    double cot = 1.0 / std::tan(M_PI / n);
    double circumradius = std::acosh(cot * cot);
    std::vector<HPoint> corners;
    corners.reserve(size_t(n));
    for (int i = 0; i < n; ++i) {
        double ang = 2.0 * M_PI * i / n;
        corners.push_back(HPoint::from_vec({std::sinh(circumradius) * std::cos(ang),
                                            std::sinh(circumradius) * std::sin(ang),
                                            std::cosh(circumradius)}));
    }
    return corners;
}

namespace {

std::vector<HPoint> polygon_from_polar(const std::vector<double>& x) {
    size_t n = x.size() / 2;
    std::vector<HPoint> corners(n);
    for (size_t i = 0; i < n; ++i) {
        double r = x[i], ang = x[n + i];
        corners[i] = HPoint::from_vec(
            {std::sinh(r) * std::cos(ang), std::sinh(r) * std::sin(ang), std::cosh(r)});
    }
    return corners;
}

// Side pairing of the standard word: blocks of four sides (a, b, a~, b~),
// pairing (4m, 4m+2) and (4m+1, 4m+3).
std::vector<std::pair<int, int>> side_pairs(int genus) {
    std::vector<std::pair<int, int>> pairs;
    for (int m = 0; m < genus; ++m) {
        pairs.push_back({4 * m, 4 * m + 2});
        pairs.push_back({4 * m + 1, 4 * m + 3});
    }
    return pairs;
}

std::vector<double> pairing_constraints(const std::vector<double>& x, int genus) {
    std::vector<HPoint> c = polygon_from_polar(x);
    size_t n = c.size();
    auto side_len = [&](int s) {
        return hyperbolic_distance(c[size_t(s)], c[(size_t(s) + 1) % n]);
    };
    std::vector<double> out;
    for (auto [a, b] : side_pairs(genus)) out.push_back(side_len(a) - side_len(b));
    double angle_sum = 0.0;
    for (size_t i = 0; i < n; ++i)
        angle_sum += interior_angle(c[(i + n - 1) % n], c[i], c[(i + 1) % n]);
    out.push_back(angle_sum - 2.0 * M_PI);
    return out;
}

}  // namespace

std::vector<HPoint> irregular_fundamental_polygon(int genus, uint64_t seed, double magnitude) {
    int n = 4 * genus;
    double cot = 1.0 / std::tan(M_PI / n);
    double base_r = std::acosh(cot * cot);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    std::vector<double> x(size_t(2 * n));
    for (int i = 0; i < n; ++i) {
        x[size_t(i)] = base_r * (1.0 + magnitude * jitter(rng));
        x[size_t(n + i)] = 2.0 * M_PI * i / n + magnitude * jitter(rng);
    }

    // Gauss-Newton projection onto the constraint manifold.
    int m = int(pairing_constraints(x, genus).size());
    for (int it = 0; it < 60; ++it) {
        std::vector<double> c = pairing_constraints(x, genus);
        double worst = 0.0;
        for (double v : c) worst = std::max(worst, std::abs(v));
        if (worst < 1e-13) break;
        // Numeric Jacobian, m x 2n.
        std::vector<std::vector<double>> J(size_t(m), std::vector<double>(x.size()));
        const double h = 1e-7;
        for (size_t p = 0; p < x.size(); ++p) {
            std::vector<double> xp = x, xm = x;
            xp[p] += h;
            xm[p] -= h;
            std::vector<double> cp = pairing_constraints(xp, genus);
            std::vector<double> cm = pairing_constraints(xm, genus);
            for (int r = 0; r < m; ++r) J[size_t(r)][p] = (cp[size_t(r)] - cm[size_t(r)]) / (2 * h);
        }
        // Minimum-norm step: dx = -J^T (J J^T)^{-1} c by Gaussian elimination.
        std::vector<std::vector<double>> a(size_t(m), std::vector<double>(size_t(m + 1), 0.0));
        for (int r = 0; r < m; ++r) {
            for (int q = 0; q < m; ++q)
                for (size_t p = 0; p < x.size(); ++p)
                    a[size_t(r)][size_t(q)] += J[size_t(r)][p] * J[size_t(q)][p];
            a[size_t(r)][size_t(m)] = c[size_t(r)];
        }
        for (int col = 0; col < m; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(a[size_t(r)][size_t(col)]) > std::abs(a[size_t(piv)][size_t(col)]))
                    piv = r;
            std::swap(a[size_t(col)], a[size_t(piv)]);
            for (int r = 0; r < m; ++r) {
                if (r == col) continue;
                double f = a[size_t(r)][size_t(col)] / a[size_t(col)][size_t(col)];
                for (int q = col; q <= m; ++q) a[size_t(r)][size_t(q)] -= f * a[size_t(col)][size_t(q)];
            }
        }
        std::vector<double> lambda(static_cast<size_t>(m));
        for (int r = 0; r < m; ++r) lambda[size_t(r)] = a[size_t(r)][size_t(m)] / a[size_t(r)][size_t(r)];
        for (size_t p = 0; p < x.size(); ++p) {
            double step = 0.0;
            for (int r = 0; r < m; ++r) step += J[size_t(r)][p] * lambda[size_t(r)];
            x[p] -= step;
        }
    }
    std::vector<double> final_c = pairing_constraints(x, genus);
    for (double v : final_c)
        if (std::abs(v) > 1e-11)
            throw geometry_error("irregular polygon projection did not converge");
    return polygon_from_polar(x);
}

namespace {

struct PoissonGrid {
    // Conformal disk coordinates keep the acceptance window isotropic.
    double cell;
    int window;
    std::unordered_map<int64_t, std::vector<std::pair<DiskPoint, HPoint>>> buckets;

    PoissonGrid(double min_dist, double max_poincare_radius) {
        double scale_min = (1.0 - max_poincare_radius * max_poincare_radius) / 2.0;
        cell = std::max(1e-4, min_dist * scale_min * 0.9);
        window = int(std::ceil(min_dist * 0.5 / cell)) + 1;
    }
    int64_t key(int ix, int iy) const { return (int64_t(ix) << 32) ^ (iy & 0xffffffffll); }
    void insert(const HPoint& p) {
        DiskPoint d = hyperboloid_to_disk(p);
        int ix = int(std::floor(d.u / cell)), iy = int(std::floor(d.v / cell));
        buckets[key(ix, iy)].push_back({d, p});
    }
    bool clear_of(const HPoint& p, double min_dist) const {
        DiskPoint d = hyperboloid_to_disk(p);
        int ix = int(std::floor(d.u / cell)), iy = int(std::floor(d.v / cell));
        for (int dx = -window; dx <= window; ++dx)
            for (int dy = -window; dy <= window; ++dy) {
                auto it = buckets.find(key(ix + dx, iy + dy));
                if (it == buckets.end()) continue;
                for (const auto& [kd, kp] : it->second)
                    if (hyperbolic_distance(p, kp) < min_dist) return false;
            }
        return true;
    }
};

}  // namespace

SyntheticSurface make_polygon_surface(const std::vector<HPoint>& corners, int genus,
                                      double spacing, uint64_t seed) {
    int n_sides = int(corners.size());
    if (n_sides != 4 * genus) throw input_error("polygon must have 4g corners");
    GeodesicPolygon outline;
    outline.verts = corners;

    SyntheticSurface out;
    MetricMesh& mesh = out.mesh;
    mesh.genus = genus;
    std::vector<HPoint>& pos = out.positions;

    // Corners first, then matched boundary subdivisions.
    for (const HPoint& c : corners) pos.push_back(c);
    std::vector<std::vector<int>> side_verts(static_cast<size_t>(n_sides));
    std::vector<double> side_len(static_cast<size_t>(n_sides));
    auto pairs = side_pairs(genus);
    std::vector<int> partner(static_cast<size_t>(n_sides));
    for (auto [a, b] : pairs) {
        partner[size_t(a)] = b;
        partner[size_t(b)] = a;
    }
    for (int s = 0; s < n_sides; ++s) {
        int t = (s + 1) % n_sides;
        side_len[size_t(s)] = hyperbolic_distance(corners[size_t(s)], corners[size_t(t)]);
    }
    // Shared subdivision count per pair from the common length.
    std::vector<int> subdiv(static_cast<size_t>(n_sides));
    for (auto [a, b] : pairs) {
        double len = 0.5 * (side_len[size_t(a)] + side_len[size_t(b)]);
        int k = std::max(2, int(std::lround(len / spacing)));
        subdiv[size_t(a)] = subdiv[size_t(b)] = k;
    }
    for (int s = 0; s < n_sides; ++s) {
        side_verts[size_t(s)].push_back(s);
        const HPoint& a = corners[size_t(s)];
        const HPoint& b = corners[size_t((s + 1) % n_sides)];
        Vec3m t = tangent_toward(a, b);
        for (int j = 1; j < subdiv[size_t(s)]; ++j) {
            double frac = double(j) / subdiv[size_t(s)];
            pos.push_back(geodesic_point(a, t, frac * side_len[size_t(s)]));
            side_verts[size_t(s)].push_back(int(pos.size()) - 1);
        }
        side_verts[size_t(s)].push_back((s + 1) % n_sides);
    }

    // Interior darts, uniform in hyperbolic measure.
    PoissonGrid grid(spacing, std::tanh(0.5 * std::acosh(corners[0].x3()) + 0.3));
    for (const HPoint& p : pos) grid.insert(p);
    std::mt19937_64 rng(seed);
    double klein_radius = 0.0;
    for (const HPoint& c : corners)
        klein_radius = std::max(klein_radius, std::hypot(klein_of(c).u, klein_of(c).v));
    std::uniform_real_distribution<double> coord(-klein_radius, klein_radius);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double density_max = 1.0 / std::pow(1.0 - klein_radius * klein_radius, 1.5);
    int idle = 0;
    const int idle_cap = 6000;
    while (idle < idle_cap) {
        ++idle;
        double u = coord(rng), v = coord(rng);
        double r2 = u * u + v * v;
        if (r2 >= klein_radius * klein_radius) continue;
        double density = 1.0 / std::pow(1.0 - r2, 1.5);
        if (unit(rng) > density / density_max) continue;
        HPoint p = klein_to_hyperboloid(u, v);
        if (!outline.contains(p)) continue;
        bool near_boundary = false;
        for (int s = 0; s < n_sides && !near_boundary; ++s)
            if (point_segment_distance(p, corners[size_t(s)], corners[size_t((s + 1) % n_sides)]) <
                0.8 * spacing)
                near_boundary = true;
        if (near_boundary) continue;
        if (!grid.clear_of(p, spacing)) continue;
        grid.insert(p);
        pos.push_back(p);
        idle = 0;
    }
    mesh.vertex_count = int(pos.size());

    // Faces from the unweighted triangulation of the samples.
    std::vector<LiftedSite> sites;
    sites.reserve(pos.size());
    for (const HPoint& p : pos) sites.push_back({p, 0.0});
    RegularTriangulation rt(sites, hilbert_order(sites));
    for (const auto& f : rt.finite_faces()) {
        mesh.faces.push_back({{f.v[0], f.v[1], f.v[2]}});
        for (int k = 0; k < 3; ++k) {
            int u0 = f.v[k], v0 = f.v[(k + 1) % 3];
            mesh.set_edge_len(u0, v0, hyperbolic_distance(pos[size_t(u0)], pos[size_t(v0)]));
        }
    }

    // Boundary sides with the standard word labels; paired edges carry
    // identical lengths by construction.
    static const char* kKind[4] = {"a", "b", "a~", "b~"};
    for (int s = 0; s < n_sides; ++s) {
        BoundarySide side;
        int block = s / 4, kind = s % 4;
        std::string label(kKind[kind]);
        side.label = label.substr(0, 1) + std::to_string(block + 1) +
                     (label.size() > 1 ? "~" : "");
        side.verts = side_verts[size_t(s)];
        mesh.boundary.push_back(std::move(side));
        // Exact equality across the pairing.
        int sp = partner[size_t(s)];
        if (s < sp) {
            double len = 0.5 * (side_len[size_t(s)] + side_len[size_t(sp)]);
            double step = len / subdiv[size_t(s)];
            for (int j = 0; j + 1 <= subdiv[size_t(s)]; ++j) {
                mesh.set_edge_len(side_verts[size_t(s)][size_t(j)],
                                  side_verts[size_t(s)][size_t(j + 1)], step);
                mesh.set_edge_len(side_verts[size_t(sp)][size_t(j)],
                                  side_verts[size_t(sp)][size_t(j + 1)], step);
            }
        }
    }

    // Every consecutive boundary pair must have come out as a mesh edge.
    for (int s = 0; s < n_sides; ++s)
        for (size_t j = 0; j + 1 < side_verts[size_t(s)].size(); ++j) {
            uint64_t key = MetricMesh::edge_key(side_verts[size_t(s)][j],
                                                side_verts[size_t(s)][j + 1]);
            if (mesh.edge_lengths.find(key) == mesh.edge_lengths.end())
                throw geometry_error("boundary segment missing from the triangulation");
        }

    mesh.finalize();
    return out;
}

SyntheticSurface make_surface(int genus, int target_vertices, uint64_t seed, bool irregular) {
    std::vector<HPoint> corners = irregular ? irregular_fundamental_polygon(genus, seed)
                                            : regular_fundamental_polygon(genus);
    double area = 2.0 * M_PI * (2.0 * genus - 2.0);
    double spacing = std::sqrt(0.75 * area / double(target_vertices));
    SyntheticSurface surf = make_polygon_surface(corners, genus, spacing, seed);
    // One corrective pass toward the requested count.
    double ratio = double(surf.mesh.surface_vertex_count) / double(target_vertices);
    if (ratio < 0.85 || ratio > 1.18) {
        spacing *= std::sqrt(ratio);
        surf = make_polygon_surface(corners, genus, spacing, seed);
    }
    return surf;
}

}  // namespace hyperot
