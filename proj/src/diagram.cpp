#include "hyperot/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace hyperot {

GeodesicCircle GeodesicCircle::from_height(const HPoint& center, double phi) {
    if (phi < 0.0) throw input_error("circle height must be nonnegative");
    return {center, std::acosh(std::exp(phi))};
}

double power_distance(const HPoint& q, const GeodesicCircle& c) {
    return -lorentz_inner(q.vec(), c.center.vec()) / std::cosh(c.radius);
}

HPoint dual_vertex(const LiftedSite& a, const LiftedSite& b, const LiftedSite& c) {
    Vec3m m1 = a.lifted() - b.lifted();
    Vec3m m2 = a.lifted() - c.lifted();
    Vec3m y = lorentz_cross(m1, m2);
    double q = -lorentz_inner(y, y);
    if (!(q > 0.0)) throw geometry_error("degenerate face: no timelike support normal");
    if (y.x3 < 0.0) y = -y;
    return HPoint::from_vec(y);
}

PowerCenter power_center(const GeodesicCircle& a, const GeodesicCircle& b,
                         const GeodesicCircle& c) {
    HPoint o = dual_vertex(a.lifted(), b.lifted(), c.lifted());
    return {o, power_distance(o, a)};
}

int classify(const HPoint& q, const std::vector<HPoint>& centers,
             const std::vector<double>& heights) {
    int best = -1;
    double best_pow = 0.0;
    for (size_t i = 0; i < centers.size(); ++i) {
        double p = power_value(q, centers[i], heights[i]);
        if (best < 0 || p < best_pow) {
            best = int(i);
            best_pow = p;
        }
    }
    return best;
}

namespace {

constexpr double kDegenerateArea = 1e-12;

struct LabeledPolygon {
    std::vector<HPoint> verts;
    std::vector<int> labels;  // label of the edge starting at verts[i]

    static LabeledPolygon from(const GeodesicPolygon& poly, int boundary_label) {
        LabeledPolygon lp;
        lp.verts = poly.verts;
        lp.labels.assign(poly.verts.size(), boundary_label);
        return lp;
    }
};

// Sutherland-Hodgman against the plane {<m, q>_H >= 0}, labeling the
// edge that runs along the cut with `label`.
LabeledPolygon clip_labeled(const LabeledPolygon& in, const Vec3m& m, int label) {
    LabeledPolygon out;
    size_t n = in.verts.size();
    if (n == 0) return out;
    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) f[i] = lorentz_inner(m, in.verts[i].vec());
    // Crossings that land on existing vertices would duplicate them; the
    // outgoing label of the kept copy is the later one.
    auto emit = [&out](const HPoint& v, int lab) {
        if (!out.verts.empty() &&
            (v.vec() - out.verts.back().vec()).max_norm() <= 1e-13 * std::max(1.0, v.x3())) {
            out.labels.back() = lab;
            return;
        }
        out.verts.push_back(v);
        out.labels.push_back(lab);
    };
    for (size_t i = 0; i < n; ++i) {
        size_t j = (i + 1) % n;
        double fa = f[i], fb = f[j];
        const Vec3m& a = in.verts[i].vec();
        const Vec3m& b = in.verts[j].vec();
        if (fa >= 0.0) {
            emit(in.verts[i], in.labels[i]);
            if (fb < 0.0) {
                double t = fa / (fa - fb);
                emit(HPoint::from_vec(a + (b - a) * t), label);
            }
        } else if (fb >= 0.0) {
            double t = fa / (fa - fb);
            emit(HPoint::from_vec(a + (b - a) * t), in.labels[i]);
        }
    }
    while (out.verts.size() > 1 &&
           (out.verts.front().vec() - out.verts.back().vec()).max_norm() <=
               1e-13 * std::max(1.0, out.verts.front().x3())) {
        out.verts.pop_back();
        out.labels.pop_back();
    }
    if (out.verts.size() < 3) {
        out.verts.clear();
        out.labels.clear();
    }
    return out;
}

PowerCell cell_from_labeled(int site, const LabeledPolygon& lp) {
    PowerCell cell;
    cell.site = site;
    cell.poly.verts = lp.verts;
    cell.edge_neighbor = lp.labels;
    if (lp.verts.size() < 3 || cell.poly.area() < kDegenerateArea) {
        cell.degenerate = true;
        cell.poly.verts.clear();
        cell.edge_neighbor.clear();
    }
    return cell;
}

PowerCell degenerate_cell(int site) {
    PowerCell cell;
    cell.site = site;
    cell.degenerate = true;
    return cell;
}

}  // namespace

DiagramPair build_planar_diagram(const std::vector<HPoint>& centers,
                                 const std::vector<double>& heights,
                                 const GeodesicPolygon& domain) {
    size_t n = centers.size();
    if (n == 0) throw input_error("no sites");
    if (heights.size() != n) throw input_error("heights size mismatch");
    if (domain.empty()) throw input_error("empty clip domain");

    DiagramPair out;
    out.diagram.domain_area = domain.area();
    out.diagram.sites.reserve(n);
    for (size_t i = 0; i < n; ++i) out.diagram.sites.push_back({centers[i], heights[i]});
    out.diagram.canonical.resize(n);
    for (size_t i = 0; i < n; ++i) out.diagram.canonical[i] = int(i);

    auto bisector = [&](size_t i, size_t j) {
        return centers[i].vec() * std::exp(-heights[i]) - centers[j].vec() * std::exp(-heights[j]);
    };
    auto clip_cell = [&](size_t i, const std::vector<int>& nbrs) {
        LabeledPolygon lp = LabeledPolygon::from(domain, -1);
        for (int j : nbrs) {
            if (lp.verts.empty()) break;
            lp = clip_labeled(lp, bisector(i, size_t(j)), j);
        }
        return cell_from_labeled(int(i), lp);
    };

    std::vector<std::vector<int>> neighbor_sets(n);
    bool have_triangulation = false;
    std::vector<std::array<int, 3>> faces;

    if (n >= 3) {
        try {
            std::vector<LiftedSite> sites = out.diagram.sites;
            RegularTriangulation rt(std::move(sites));
            have_triangulation = true;
            for (size_t i = 0; i < n; ++i) {
                if (rt.hidden(int(i))) continue;
                for (int v : rt.neighbors(int(i)))
                    if (v != RegularTriangulation::kInfinite) neighbor_sets[i].push_back(v);
                std::sort(neighbor_sets[i].begin(), neighbor_sets[i].end());
                neighbor_sets[i].erase(
                    std::unique(neighbor_sets[i].begin(), neighbor_sets[i].end()),
                    neighbor_sets[i].end());
            }
            for (const auto& f : rt.finite_faces()) faces.push_back({f.v[0], f.v[1], f.v[2]});
            for (size_t i = 0; i < n; ++i)
                out.diagram.cells.push_back(rt.hidden(int(i)) ? degenerate_cell(int(i))
                                                              : clip_cell(i, neighbor_sets[i]));
        } catch (const geometry_error&) {
            have_triangulation = false;
            out.diagram.cells.clear();
        }
    }
    if (!have_triangulation) {
        // Collinear or tiny inputs: clip against every other site.
        for (size_t i = 0; i < n; ++i) {
            std::vector<int> all;
            for (size_t j = 0; j < n; ++j)
                if (j != i) all.push_back(int(j));
            out.diagram.cells.push_back(clip_cell(i, all));
        }
    }

    // Realized adjacency: edges of positive length in the clipped cells.
    std::unordered_set<uint64_t> realized;
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (uint64_t(uint32_t(a)) << 32) | uint64_t(uint32_t(b));
    };
    for (const PowerCell& c : out.diagram.cells) {
        for (size_t e = 0; e < c.edge_neighbor.size(); ++e) {
            int j = c.edge_neighbor[e];
            if (j < 0) continue;
            const HPoint& a = c.poly.verts[e];
            const HPoint& b = c.poly.verts[(e + 1) % c.poly.verts.size()];
            if (hyperbolic_distance(a, b) > 1e-12) realized.insert(key(c.site, j));
        }
    }
    for (uint64_t k : realized)
        out.delaunay.edges.push_back({int(k >> 32), int(k & 0xffffffffu)});
    std::sort(out.delaunay.edges.begin(), out.delaunay.edges.end());
    for (const auto& f : faces) {
        if (realized.count(key(f[0], f[1])) && realized.count(key(f[1], f[2])) &&
            realized.count(key(f[0], f[2])))
            out.delaunay.triangles.push_back(f);
    }
    return out;
}

DiagramPair build_power_diagram(const std::vector<GeodesicCircle>& circles,
                                const std::optional<GeodesicPolygon>& domain) {
    std::vector<HPoint> centers;
    std::vector<double> heights;
    centers.reserve(circles.size());
    for (const GeodesicCircle& c : circles) {
        centers.push_back(c.center);
        heights.push_back(c.height());
    }
    GeodesicPolygon clip;
    if (domain) {
        clip = *domain;
    } else {
        clip = convex_hull(centers);
        if (clip.empty()) throw geometry_error("degenerate default domain: sites are collinear");
    }
    return build_planar_diagram(centers, heights, clip);
}

std::vector<double> cell_areas(const PowerDiagram& d) {
    std::vector<double> w(d.cells.size(), 0.0);
    for (size_t i = 0; i < d.cells.size(); ++i)
        if (!d.cells[i].degenerate) w[i] = d.cells[i].poly.area();
    return w;
}

HessianEdgeGeometry hessian_edge_geometry(const HPoint& xi, double phi_i, const HPoint& xj,
                                          double phi_j, const HPoint& edge_a,
                                          const HPoint& edge_b) {
    // Foot of the bisector on the full geodesic line through the two
    // sites: it can fall outside the segment when one weight dominates,
    // so the sub-distances below are signed.
    Vec3m m = xi.vec() * std::exp(-phi_i) - xj.vec() * std::exp(-phi_j);
    Vec3m u = tangent_toward(xi, xj);
    double ratio = -lorentz_inner(m, xi.vec()) / lorentz_inner(m, u);
    if (!(std::abs(ratio) < 1.0))
        throw geometry_error("bisector does not cross the joining geodesic");
    HPoint q = geodesic_point(xi, u, std::atanh(ratio));

    HessianEdgeGeometry g;
    g.gamma_i = std::asinh(lorentz_inner(q.vec(), u));
    g.gamma_j = std::asinh(lorentz_inner(q.vec(), tangent_toward(xj, xi)));

    // Unit tangent of the bisector geodesic at the foot.
    Vec3m tangent = lorentz_cross(q.vec(), m);
    double tn = lorentz_inner(tangent, tangent);
    if (!(tn > 0.0)) throw geometry_error("degenerate bisector tangent");
    tangent = tangent * (1.0 / std::sqrt(tn));
    double sa = lorentz_inner(edge_a.vec(), tangent);
    double sb = lorentz_inner(edge_b.vec(), tangent);
    double lo = std::min(sa, sb), hi = std::max(sa, sb);
    g.d_k = std::asinh(-lo);
    g.d_l = std::asinh(hi);
    return g;
}

}  // namespace hyperot
