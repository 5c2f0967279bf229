#include "hyperot/hull.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace hyperot {

namespace {

constexpr double kDupDistance = 1e-9;
constexpr double kDetBand = 1e-12;  // relative tie band for predicates

double band(double scale) { return kDetBand * std::max(scale, 1e-30); }

// Coordinate test for coincident centers: the inner-product distance
// cannot resolve separations below ~1e-8.
bool near_duplicate(const HPoint& p, const HPoint& q) {
    return (p.vec() - q.vec()).max_norm() <= kDupDistance * std::max(1.0, p.x3());
}

}  // namespace

RegularTriangulation::RegularTriangulation(std::vector<LiftedSite> sites,
                                           const std::vector<int>& insertion_order)
    : sites_(std::move(sites)) {
    int n = int(sites_.size());
    if (n < 3) throw input_error("need at least 3 sites");
    lifted_.resize(size_t(n));
    klein_.resize(size_t(n));
    for (int i = 0; i < n; ++i) {
        lifted_[size_t(i)] = sites_[size_t(i)].lifted();
        klein_[size_t(i)] = klein_of(sites_[size_t(i)].center);
    }
    vert2tri_.assign(size_t(n), -1);
    hidden_.assign(size_t(n), false);
    init_first_triangle();
    if (insertion_order.empty()) {
        for (int i = 0; i < n; ++i)
            if (vert2tri_[size_t(i)] < 0 && !hidden_[size_t(i)]) insert(i);
    } else {
        if (insertion_order.size() != size_t(n)) throw input_error("bad insertion order");
        for (int i : insertion_order)
            if (vert2tri_[size_t(i)] < 0 && !hidden_[size_t(i)]) insert(i);
    }
}

double RegularTriangulation::orient(int a, int b, int c) const {
    return triple_det(sites_[size_t(a)].center.vec(), sites_[size_t(b)].center.vec(),
                      sites_[size_t(c)].center.vec());
}

int RegularTriangulation::make_tri(int a, int b, int c) {
    int id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
    } else {
        id = int(tris_.size());
        tris_.push_back(Tri{});
    }
    Tri& t = tris_[size_t(id)];
    t.v[0] = a;
    t.v[1] = b;
    t.v[2] = c;
    t.n[0] = t.n[1] = t.n[2] = -1;
    t.alive = true;
    for (int k = 0; k < 3; ++k)
        if (t.v[k] != kInfinite) vert2tri_[size_t(t.v[k])] = id;
    return id;
}

void RegularTriangulation::init_first_triangle() {
    int n = int(sites_.size());
    int s0 = 0, s1 = -1, s2 = -1;
    for (int i = 1; i < n && s1 < 0; ++i)
        if (!near_duplicate(sites_[size_t(i)].center, sites_[size_t(s0)].center)) s1 = i;
    if (s1 < 0) throw input_error("all site centers coincide");
    for (int i = 1; i < n && s2 < 0; ++i) {
        if (i == s1) continue;
        double o = orient(s0, s1, i);
        double scale = sites_[size_t(s0)].center.vec().max_norm() *
                       sites_[size_t(s1)].center.vec().max_norm() *
                       sites_[size_t(i)].center.vec().max_norm();
        if (std::abs(o) > 1e-9 * scale) s2 = i;
    }
    if (s2 < 0) throw geometry_error("site centers are collinear");
    if (orient(s0, s1, s2) < 0.0) std::swap(s1, s2);

    // The outer wedge of hull edge u -> w is stored (w, u, INF) so that
    // every shared edge is traversed oppositely by its two triangles; the
    // cavity re-star rule then orients all fresh triangles uniformly.
    int t0 = make_tri(s0, s1, s2);
    int i01 = make_tri(s1, s0, kInfinite);
    int i12 = make_tri(s2, s1, kInfinite);
    int i20 = make_tri(s0, s2, kInfinite);
    tris_[size_t(t0)].n[0] = i12;  // edge (s1, s2)
    tris_[size_t(t0)].n[1] = i20;  // edge (s2, s0)
    tris_[size_t(t0)].n[2] = i01;  // edge (s0, s1)
    // (w, u, INF): n[0] across (u, INF) = wedge ending at u,
    //              n[1] across (INF, w) = wedge starting at w.
    auto wire_inf = [&](int it, int finite, int ending_at_u, int starting_at_w) {
        tris_[size_t(it)].n[2] = finite;
        tris_[size_t(it)].n[0] = ending_at_u;
        tris_[size_t(it)].n[1] = starting_at_w;
    };
    wire_inf(i01, t0, i20, i12);
    wire_inf(i12, t0, i01, i20);
    wire_inf(i20, t0, i12, i01);
    hint_ = t0;
}

// Side-of-plane test of the lifted query against a finite face, positive
// tie band resolved toward the lowest site index.
bool RegularTriangulation::finite_conflict(const Tri& t, int s) const {
    const Vec3m& za = lifted_[size_t(t.v[0])];
    Vec3m e1 = lifted_[size_t(t.v[1])] - za;
    Vec3m e2 = lifted_[size_t(t.v[2])] - za;
    Vec3m dp = lifted_[size_t(s)] - za;
    double d = triple_det(dp, e1, e2);
    double scale = dp.max_norm() * e1.max_norm() * e2.max_norm();
    double eps = band(scale);
    if (d < -eps) return true;
    if (d > eps) return false;
    return s < std::min(t.v[0], std::min(t.v[1], t.v[2]));
}

bool RegularTriangulation::in_conflict(int tri, int s) const {
    if (conflict_epoch_.size() != tris_.size()) {
        conflict_epoch_.resize(tris_.size(), 0);
        conflict_value_.resize(tris_.size(), 0);
    }
    if (conflict_epoch_[size_t(tri)] == epoch_) return conflict_value_[size_t(tri)] != 0;
    const Tri& t = tris_[size_t(tri)];
    bool result;
    int inf_slot = -1;
    for (int k = 0; k < 3; ++k)
        if (t.v[k] == kInfinite) inf_slot = k;
    if (inf_slot < 0) {
        result = finite_conflict(t, s);
    } else {
        // Stored (w, u, INF): the hull edge runs u -> w, outside on the
        // left of the stored order.
        int w = t.v[(inf_slot + 1) % 3];
        int u = t.v[(inf_slot + 2) % 3];
        double o = orient(u, w, s);
        double scale = sites_[size_t(u)].center.vec().max_norm() *
                       sites_[size_t(w)].center.vec().max_norm() *
                       sites_[size_t(s)].center.vec().max_norm();
        double eps = band(scale) * 10.0;
        if (o < -eps) {
            result = true;
        } else if (o > eps) {
            result = false;
        } else {
            // Collinear with the hull edge: inside the segment the verdict
            // must match the finite side so the cavity stays consistent.
            const DiskPoint& ku = klein_[size_t(u)];
            const DiskPoint& kw = klein_[size_t(w)];
            const DiskPoint& kp = klein_[size_t(s)];
            double du = (kw.u - ku.u), dv = (kw.v - ku.v);
            double len2 = du * du + dv * dv;
            double tpar = ((kp.u - ku.u) * du + (kp.v - ku.v) * dv) / len2;
            if (tpar < 0.0 || tpar > 1.0) {
                result = false;  // a strictly visible edge exists elsewhere
            } else {
                result = finite_conflict(tris_[size_t(t.n[inf_slot])], s);
            }
        }
    }
    conflict_epoch_[size_t(tri)] = epoch_;
    conflict_value_[size_t(tri)] = result ? 1 : 0;
    return result;
}

int RegularTriangulation::locate(int s, int hint) const {
    const DiskPoint& p = klein_[size_t(s)];
    int t = hint;
    if (t < 0 || !tris_[size_t(t)].alive || !tri_is_finite(t)) {
        t = -1;
        for (size_t i = 0; i < tris_.size(); ++i)
            if (tris_[i].alive && tri_is_finite(int(i))) {
                t = int(i);
                break;
            }
        if (t < 0) throw geometry_error("triangulation has no finite faces");
    }
    size_t steps = 0, max_steps = 4 * tris_.size() + 64;
    int prev = -1;
    while (true) {
        if (++steps > max_steps) break;
        const Tri& tri = tris_[size_t(t)];
        int cross = -1;
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            int a = tri.v[(k + 1) % 3];
            int b = tri.v[(k + 2) % 3];
            const DiskPoint& ka = klein_[size_t(a)];
            const DiskPoint& kb = klein_[size_t(b)];
            double o = (kb.u - ka.u) * (p.v - ka.v) - (kb.v - ka.v) * (p.u - ka.u);
            if (o < worst && tri.n[k] != prev) {
                worst = o;
                cross = k;
            }
        }
        if (cross < 0) return t;
        int nb = tri.n[size_t(cross)];
        if (!tri_is_finite(nb)) return nb;
        prev = t;
        t = nb;
    }
    // Walk failed to settle; fall back to scanning.
    for (size_t i = 0; i < tris_.size(); ++i) {
        if (!tris_[i].alive || !tri_is_finite(int(i))) continue;
        const Tri& tri = tris_[i];
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k) {
            int a = tri.v[(k + 1) % 3];
            int b = tri.v[(k + 2) % 3];
            const DiskPoint& ka = klein_[size_t(a)];
            const DiskPoint& kb = klein_[size_t(b)];
            double o = (kb.u - ka.u) * (p.v - ka.v) - (kb.v - ka.v) * (p.u - ka.u);
            if (o < -1e-14) inside = false;
        }
        if (inside) return int(i);
    }
    for (size_t i = 0; i < tris_.size(); ++i)
        if (tris_[i].alive && !tri_is_finite(int(i))) {
            if (in_conflict(int(i), s)) return int(i);
        }
    throw geometry_error("point location failed");
}

void RegularTriangulation::insert(int s) {
    ++epoch_;
    int t0 = locate(s, hint_);

    // Reject near-coincident centers.
    for (int k = 0; k < 3; ++k) {
        int v = tris_[size_t(t0)].v[k];
        if (v == kInfinite) continue;
        if (near_duplicate(sites_[size_t(s)].center, sites_[size_t(v)].center))
            throw input_error("duplicate site centers");
    }

    // Seed the conflict region; a located triangle out of conflict means
    // the lifted point is inside the hull and the site is hidden.
    int seed = -1;
    if (in_conflict(t0, s)) {
        seed = t0;
    } else {
        for (int k = 0; k < 3 && seed < 0; ++k) {
            int nb = tris_[size_t(t0)].n[k];
            if (nb >= 0 && in_conflict(nb, s)) seed = nb;
        }
    }
    if (seed < 0) {
        hidden_[size_t(s)] = true;
        return;
    }

    std::vector<int> cavity;
    std::vector<int> stack{seed};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[size_t(seed)] = 1;
    struct Boundary {
        int e0, e1, outside, dying, dying_slot;
    };
    std::vector<Boundary> boundary;
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        cavity.push_back(t);
        for (int k = 0; k < 3; ++k) {
            int nb = tris_[size_t(t)].n[k];
            if (in_cavity[size_t(nb)]) continue;
            if (in_conflict(nb, s)) {
                in_cavity[size_t(nb)] = 1;
                stack.push_back(nb);
            } else {
                boundary.push_back({tris_[size_t(t)].v[(k + 1) % 3],
                                    tris_[size_t(t)].v[(k + 2) % 3], nb, t, k});
            }
        }
    }

    // Vertices interior to the cavity lose all their faces: hidden.
    std::vector<int> cavity_verts;
    for (int t : cavity)
        for (int k = 0; k < 3; ++k)
            if (tris_[size_t(t)].v[k] != kInfinite) cavity_verts.push_back(tris_[size_t(t)].v[k]);
    std::sort(cavity_verts.begin(), cavity_verts.end());
    cavity_verts.erase(std::unique(cavity_verts.begin(), cavity_verts.end()), cavity_verts.end());

    std::unordered_map<int, int> by_start, by_end;
    for (int t : cavity) tris_[size_t(t)].alive = false;
    std::vector<int> fresh;
    fresh.reserve(boundary.size());
    for (const Boundary& b : boundary) {
        int nt = make_tri(s, b.e0, b.e1);
        tris_[size_t(nt)].n[0] = b.outside;
        for (int k = 0; k < 3; ++k)
            if (tris_[size_t(b.outside)].n[k] == b.dying) tris_[size_t(b.outside)].n[k] = nt;
        by_start[b.e0] = nt;
        by_end[b.e1] = nt;
        fresh.push_back(nt);
    }
    for (int nt : fresh) {
        const Tri& t = tris_[size_t(nt)];
        tris_[size_t(nt)].n[1] = by_start.at(t.v[2]);  // edge (e1, s)
        tris_[size_t(nt)].n[2] = by_end.at(t.v[1]);    // edge (s, e0)
    }
    for (int t : cavity) free_.push_back(t);

    for (int v : cavity_verts) {
        if (v == s) continue;
        if (by_start.find(v) == by_start.end() && by_end.find(v) == by_end.end()) {
            hidden_[size_t(v)] = true;
            vert2tri_[size_t(v)] = -1;
        }
    }
    hint_ = fresh.empty() ? hint_ : fresh.front();
}

std::vector<RegularTriangulation::Face> RegularTriangulation::finite_faces() const {
    std::vector<Face> out;
    for (const Tri& t : tris_) {
        if (!t.alive) continue;
        if (t.v[0] == kInfinite || t.v[1] == kInfinite || t.v[2] == kInfinite) continue;
        out.push_back(Face{{t.v[0], t.v[1], t.v[2]}});
    }
    return out;
}

std::vector<int> RegularTriangulation::star(int site) const {
    std::vector<int> out;
    int t0 = vert2tri_[size_t(site)];
    if (t0 < 0) return out;
    int t = t0;
    size_t guard = 0;
    do {
        if (++guard > tris_.size() + 4) throw geometry_error("broken star ring");
        out.push_back(t);
        const Tri& tri = tris_[size_t(t)];
        int slot = -1;
        for (int k = 0; k < 3; ++k)
            if (tri.v[k] == site) slot = k;
        if (slot < 0) throw geometry_error("star ring left its vertex");
        t = tri.n[(slot + 1) % 3];  // rotate counterclockwise
    } while (t != t0);
    return out;
}

std::vector<int> RegularTriangulation::neighbors(int site) const {
    std::vector<int> out;
    for (int t : star(site)) {
        const Tri& tri = tris_[size_t(t)];
        int slot = -1;
        for (int k = 0; k < 3; ++k)
            if (tri.v[k] == site) slot = k;
        out.push_back(tri.v[(slot + 1) % 3]);
    }
    return out;
}

HPoint RegularTriangulation::face_normal(int a, int b, int c) const {
    Vec3m m1 = lifted_[size_t(a)] - lifted_[size_t(b)];
    Vec3m m2 = lifted_[size_t(a)] - lifted_[size_t(c)];
    Vec3m y = lorentz_cross(m1, m2);
    double q = -lorentz_inner(y, y);
    if (!(q > 0.0)) throw geometry_error("degenerate face: support normal is not timelike");
    if (y.x3 < 0.0) y = -y;
    return HPoint::from_vec(y);
}

ConvexHull build_hull(const std::vector<LiftedSite>& sites) {
    if (sites.size() < 3) throw input_error("need at least 3 sites");
    RegularTriangulation rt(sites);
    ConvexHull hull;
    hull.sites = sites;
    hull.lifted.reserve(sites.size());
    for (const LiftedSite& s : sites) hull.lifted.push_back(s.lifted());
    hull.hidden.resize(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) hull.hidden[i] = rt.hidden(int(i));

    auto faces = rt.finite_faces();
    std::unordered_map<uint64_t, int> edge_owner;
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (uint64_t(uint32_t(a)) << 32) | uint64_t(uint32_t(b));
    };
    for (size_t f = 0; f < faces.size(); ++f) {
        ConvexHull::Face face;
        for (int k = 0; k < 3; ++k) {
            face.v[k] = faces[f].v[k];
            face.nbr[k] = -1;
        }
        try {
            face.normal = rt.face_normal(face.v[0], face.v[1], face.v[2]);
            face.has_normal = true;
        } catch (const geometry_error&) {
            face.has_normal = false;
        }
        hull.faces.push_back(face);
    }
    for (size_t f = 0; f < hull.faces.size(); ++f)
        for (int k = 0; k < 3; ++k) {
            int a = hull.faces[f].v[(k + 1) % 3];
            int b = hull.faces[f].v[(k + 2) % 3];
            auto it = edge_owner.find(key(a, b));
            if (it == edge_owner.end()) {
                edge_owner[key(a, b)] = int(f) * 3 + k;
            } else {
                int of = it->second / 3, ok = it->second % 3;
                hull.faces[size_t(f)].nbr[k] = of;
                hull.faces[size_t(of)].nbr[ok] = int(f);
            }
        }
    return hull;
}

std::vector<int> hilbert_order(const std::vector<LiftedSite>& sites) {
    auto d2xy_index = [](uint32_t x, uint32_t y) {
        // 16-bit Hilbert curve index of a grid cell.
        uint32_t rx, ry, d = 0;
        for (uint32_t s = 1u << 15; s > 0; s /= 2) {
            rx = (x & s) > 0 ? 1 : 0;
            ry = (y & s) > 0 ? 1 : 0;
            d += s * s * ((3 * rx) ^ ry);
            if (ry == 0) {
                if (rx == 1) {
                    x = s - 1 - x;
                    y = s - 1 - y;
                }
                std::swap(x, y);
            }
        }
        return d;
    };
    std::vector<std::pair<uint32_t, int>> keyed(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) {
        DiskPoint k = klein_of(sites[i].center);
        auto qu = uint32_t(std::min(65535.0, std::max(0.0, (k.u + 1.0) * 32767.5)));
        auto qv = uint32_t(std::min(65535.0, std::max(0.0, (k.v + 1.0) * 32767.5)));
        keyed[i] = {d2xy_index(qu, qv), int(i)};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) order[i] = keyed[i].second;
    return order;
}

}  // namespace hyperot
