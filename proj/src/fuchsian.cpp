#include "hyperot/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>

namespace hyperot {

double MetricMesh::edge_len(int u, int v) const {
    auto it = edge_lengths.find(edge_key(u, v));
    if (it == edge_lengths.end()) throw input_error("missing edge length");
    return it->second;
}

void MetricMesh::set_edge_len(int u, int v, double l) { edge_lengths[edge_key(u, v)] = l; }

double MetricMesh::face_area(const MeshFace& f) const {
    return triangle_area(edge_len(f.v[1], f.v[2]), edge_len(f.v[0], f.v[2]),
                         edge_len(f.v[0], f.v[1]));
}

double MetricMesh::metric_area() const {
    double total = 0.0;
    for (const MeshFace& f : faces) total += face_area(f);
    return total;
}

void MetricMesh::finalize() {
    if (genus < 2) throw input_error("genus must be at least 2");
    if (int(boundary.size()) != 4 * genus) throw input_error("boundary word must have 4g sides");

    // Union-find over cut vertices driven by the side pairing.
    std::vector<int> parent(static_cast<size_t>(vertex_count));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int a) {
        while (parent[size_t(a)] != a) {
            parent[size_t(a)] = parent[size_t(parent[size_t(a)])];
            a = parent[size_t(a)];
        }
        return a;
    };
    auto unite = [&](int a, int b) { parent[size_t(find(a))] = find(b); };

    auto partner_label = [](const std::string& l) {
        return l.back() == '~' ? l.substr(0, l.size() - 1) : l + "~";
    };
    for (size_t s = 0; s < boundary.size(); ++s) {
        const BoundarySide& side = boundary[s];
        if (side.verts.size() < 2) throw input_error("boundary side needs at least 2 vertices");
        // Consecutive sides share their corner vertex.
        const BoundarySide& next = boundary[(s + 1) % boundary.size()];
        if (side.verts.back() != next.verts.front())
            throw input_error("boundary sides do not chain");
        if (side.label.back() == '~') continue;
        std::string want = partner_label(side.label);
        const BoundarySide* partner = nullptr;
        for (const BoundarySide& o : boundary)
            if (o.label == want) partner = &o;
        if (!partner) throw input_error("unpaired boundary side " + side.label);
        if (partner->verts.size() != side.verts.size())
            throw input_error("paired sides differ in vertex count");
        size_t m = side.verts.size();
        for (size_t t = 0; t < m; ++t) unite(side.verts[t], partner->verts[m - 1 - t]);
    }

    surface_vertex.assign(size_t(vertex_count), -1);
    surface_vertex_count = 0;
    for (int v = 0; v < vertex_count; ++v) {
        int r = find(v);
        if (surface_vertex[size_t(r)] < 0) surface_vertex[size_t(r)] = surface_vertex_count++;
        surface_vertex[size_t(v)] = surface_vertex[size_t(r)];
    }
}

bool FundamentalDomain::contains(const HPoint& p, double slack) const {
    // Even-odd ray crossing on the Klein boundary, counting points within
    // `slack` of the boundary as inside.
    const std::vector<HPoint>& ring = straight_sides ? corner_outline.verts : boundary_loop;
    DiskPoint q = klein_of(p);
    size_t n = ring.size();
    bool inside = false;
    for (size_t i = 0; i < n; ++i) {
        DiskPoint a = klein_of(ring[i]);
        DiskPoint b = klein_of(ring[(i + 1) % n]);
        if ((a.v > q.v) != (b.v > q.v)) {
            double xi = a.u + (q.v - a.v) / (b.v - a.v) * (b.u - a.u);
            if (q.u < xi) inside = !inside;
        }
    }
    if (inside) return true;
    return slack > 0.0 && outside_distance(p) <= slack;
}

double FundamentalDomain::outside_distance(const HPoint& p) const {
    const std::vector<HPoint>& ring = straight_sides ? corner_outline.verts : boundary_loop;
    double best = std::numeric_limits<double>::infinity();
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(p, ring[i], ring[(i + 1) % n]));
    return best;
}

namespace {

// Approximate center of the face adjacency graph by the double sweep:
// drift of the developing map grows with tree depth, so seeding centrally
// roughly halves it and keeps coordinates small.
int central_face(const std::vector<std::vector<int>>& adjacency) {
    auto bfs = [&](int start) {
        std::vector<int> parent(adjacency.size(), -2);
        std::deque<int> q{start};
        parent[size_t(start)] = -1;
        int last = start;
        while (!q.empty()) {
            int f = q.front();
            q.pop_front();
            last = f;
            for (int g : adjacency[size_t(f)])
                if (parent[size_t(g)] == -2) {
                    parent[size_t(g)] = f;
                    q.push_back(g);
                }
        }
        return std::pair<int, std::vector<int>>(last, std::move(parent));
    };
    int far1 = bfs(0).first;
    auto [far2, parent] = bfs(far1);
    std::vector<int> path;
    for (int f = far2; f >= 0; f = parent[size_t(f)]) path.push_back(f);
    return path[path.size() / 2];
}

}  // namespace

FundamentalDomain embed_domain(const MetricMesh& mesh) {
    if (mesh.faces.empty()) throw input_error("mesh has no faces");
    size_t nf = mesh.faces.size();

    // Face adjacency across shared directed edges.
    std::unordered_map<uint64_t, std::pair<int, int>> edge_faces;
    for (size_t f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k) {
            uint64_t key = MetricMesh::edge_key(mesh.faces[f].v[k], mesh.faces[f].v[(k + 1) % 3]);
            auto it = edge_faces.find(key);
            if (it == edge_faces.end())
                edge_faces[key] = {int(f), -1};
            else if (it->second.second < 0)
                it->second.second = int(f);
            else
                throw input_error("non-manifold edge");
        }
    std::vector<std::vector<int>> adjacency(nf);
    for (const auto& [key, pair] : edge_faces)
        if (pair.second >= 0) {
            adjacency[size_t(pair.first)].push_back(pair.second);
            adjacency[size_t(pair.second)].push_back(pair.first);
        }
    int seed = central_face(adjacency);

    std::vector<HPoint> tau(size_t(mesh.vertex_count));
    std::vector<char> placed(size_t(mesh.vertex_count), 0);
    std::vector<char> done(nf, 0);

    // Seed face: apex, the x1 axis branch, and the angle at the seed corner.
    {
        const MeshFace& f = mesh.faces[size_t(seed)];
        double l01 = mesh.edge_len(f.v[0], f.v[1]);
        double l02 = mesh.edge_len(f.v[0], f.v[2]);
        double l12 = mesh.edge_len(f.v[1], f.v[2]);
        double cosv = (std::cosh(l01) * std::cosh(l02) - std::cosh(l12)) /
                      (std::sinh(l01) * std::sinh(l02));
        cosv = std::clamp(cosv, -1.0, 1.0);
        double theta = std::acos(cosv);
        tau[size_t(f.v[0])] = HPoint::unchecked({0.0, 0.0, 1.0});
        tau[size_t(f.v[1])] = HPoint::from_vec({std::sinh(l01), 0.0, std::cosh(l01)});
        tau[size_t(f.v[2])] = HPoint::from_vec(
            {std::sinh(l02) * std::cos(theta), std::sinh(l02) * std::sin(theta), std::cosh(l02)});
        placed[size_t(f.v[0])] = placed[size_t(f.v[1])] = placed[size_t(f.v[2])] = 1;
        done[size_t(seed)] = 1;
    }

    std::deque<int> queue{seed};
    size_t embedded = 1;
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop_front();
        for (int k = 0; k < 3; ++k) {
            uint64_t key = MetricMesh::edge_key(mesh.faces[size_t(f)].v[k],
                                                mesh.faces[size_t(f)].v[(k + 1) % 3]);
            auto [fa, fb] = edge_faces[key];
            int g = (fa == f) ? fb : fa;
            if (g < 0 || done[size_t(g)]) continue;
            const MeshFace& face = mesh.faces[size_t(g)];
            int fresh = -1, n_placed = 0;
            for (int j = 0; j < 3; ++j) {
                if (placed[size_t(face.v[j])])
                    ++n_placed;
                else
                    fresh = j;
            }
            if (n_placed < 2) continue;  // revisit once more corners exist
            if (fresh >= 0) {
                int vi = face.v[(fresh + 1) % 3];
                int vj = face.v[(fresh + 2) % 3];
                int vk = face.v[size_t(fresh)];
                auto [p1, p2] = circle_circle_intersection(tau[size_t(vi)],
                                                           mesh.edge_len(vi, vk),
                                                           tau[size_t(vj)],
                                                           mesh.edge_len(vj, vk));
                // Keep the solution with positive orientation for the face
                // as listed (counterclockwise).
                HPoint cand[2] = {p1, p2};
                int pick = -1;
                for (int c = 0; c < 2; ++c) {
                    HPoint probe[3];
                    for (int j = 0; j < 3; ++j)
                        probe[j] = (j == fresh) ? cand[c] : tau[size_t(face.v[j])];
                    if (triple_det(probe[0].vec(), probe[1].vec(), probe[2].vec()) > 0.0) pick = c;
                }
                if (pick < 0) throw geometry_error("no orientation-consistent placement");
                tau[size_t(vk)] = cand[size_t(pick)];
                placed[size_t(vk)] = 1;
            }
            done[size_t(g)] = 1;
            ++embedded;
            queue.push_back(g);
        }
    }
    if (embedded != nf) throw input_error("mesh is not edge-connected");

    // Every edge length must be realized.
    double worst = 0.0;
    for (const auto& [key, len] : mesh.edge_lengths) {
        int u = int(key >> 32), v = int(key & 0xffffffffu);
        if (!placed[size_t(u)] || !placed[size_t(v)]) throw input_error("isolated vertex");
        worst = std::max(worst, std::abs(hyperbolic_distance(tau[size_t(u)], tau[size_t(v)]) - len));
    }
    if (worst > 1e-5)
        throw geometry_error("embedding drift exceeds tolerance: " + std::to_string(worst));

    FundamentalDomain dom;
    dom.tau = std::move(tau);
    for (const BoundarySide& side : mesh.boundary) {
        std::vector<HPoint> pl;
        pl.reserve(side.verts.size());
        for (int v : side.verts) pl.push_back(dom.tau[size_t(v)]);
        dom.sides.push_back(std::move(pl));
    }
    for (const BoundarySide& side : mesh.boundary)
        for (size_t t = 0; t + 1 < side.verts.size(); ++t)
            dom.boundary_loop.push_back(dom.tau[size_t(side.verts[t])]);
    for (const BoundarySide& side : mesh.boundary)
        dom.corner_outline.verts.push_back(dom.tau[size_t(side.verts.front())]);

    dom.straight_sides = true;
    for (const std::vector<HPoint>& side : dom.sides)
        for (size_t t = 1; t + 1 < side.size() && dom.straight_sides; ++t)
            if (point_segment_distance(side[t], side.front(), side.back()) > 1e-5)
                dom.straight_sides = false;
    return dom;
}

std::optional<HPoint> apply_safe(const LorentzIsometry& g, const HPoint& p) {
    Vec3m v = g.apply(p.vec());
    double q = -lorentz_inner(v, v);
    if (!(q > 0.5) || v.x3 <= 0.0 || v.x3 > std::cosh(18.0)) return std::nullopt;
    return HPoint::from_vec(v);
}

LorentzIsometry FuchsianGroup::letter(int l) const {
    if (l == 0 || std::abs(l) > int(gens.size())) throw input_error("bad generator letter");
    const LorentzIsometry& g = gens[size_t(std::abs(l) - 1)];
    return l > 0 ? g : g.inverse();
}

namespace {

LorentzIsometry frame_at(const HPoint& p, const Vec3m& t) {
    Vec3m w = lorentz_cross(p.vec(), t);
    // Columns (t, w, p) form a future-preserving Lorentz frame.
    return LorentzIsometry::unchecked({{{t.x1, w.x1, p.x1()},
                                        {t.x2, w.x2, p.x2()},
                                        {t.x3, w.x3, p.x3()}}});
}

// Orientation-preserving isometry sending (a1 -> b1, a2 -> b2).
LorentzIsometry align_pairs(const HPoint& a1, const HPoint& a2, const HPoint& b1,
                            const HPoint& b2) {
    LorentzIsometry src = frame_at(a1, tangent_toward(a1, a2));
    LorentzIsometry dst = frame_at(b1, tangent_toward(b1, b2));
    return dst.compose(src.inverse()).reprojected();
}

// A few Gauss-Newton sweeps over the 3-parameter group tangent to pull
// G toward the least-squares fit of all polyline samples. Sweeps that do
// not improve the worst residual are rolled back.
LorentzIsometry refine_fit(LorentzIsometry g, const std::vector<HPoint>& src,
                           const std::vector<HPoint>& dst) {
    static const double basis[3][3][3] = {
        {{0, -1, 0}, {1, 0, 0}, {0, 0, 0}},  // rotation
        {{0, 0, 1}, {0, 0, 0}, {1, 0, 0}},   // boost x1
        {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}},   // boost x2
    };
    auto worst_residual = [&](const LorentzIsometry& cand) {
        double worst = 0.0;
        for (size_t t = 0; t < src.size(); ++t)
            worst = std::max(worst, (cand.apply(src[t].vec()) - dst[t].vec()).max_norm());
        return worst;
    };
    double best = worst_residual(g);
    for (int sweep = 0; sweep < 4; ++sweep) {
        double jtj[3][3] = {{0}}, jtr[3] = {0};
        for (size_t s = 0; s < src.size(); ++s) {
            Vec3m gs = g.apply(src[s].vec());
            Vec3m res = dst[s].vec() - gs;
            Vec3m cols[3];
            for (int k = 0; k < 3; ++k) {
                // d/d eps of exp(eps A_k) g s = A_k (g s)
                cols[k] = {basis[k][0][0] * gs.x1 + basis[k][0][1] * gs.x2 + basis[k][0][2] * gs.x3,
                           basis[k][1][0] * gs.x1 + basis[k][1][1] * gs.x2 + basis[k][1][2] * gs.x3,
                           basis[k][2][0] * gs.x1 + basis[k][2][1] * gs.x2 + basis[k][2][2] * gs.x3};
            }
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c)
                    jtj[r][c] += cols[r].x1 * cols[c].x1 + cols[r].x2 * cols[c].x2 +
                                 cols[r].x3 * cols[c].x3;
                jtr[r] += cols[r].x1 * res.x1 + cols[r].x2 * res.x2 + cols[r].x3 * res.x3;
            }
        }
        // Solve the 3x3 normal system by Cramer.
        auto det3 = [](const double m[3][3]) {
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        };
        double d = det3(jtj);
        if (std::abs(d) < 1e-30) break;
        double eps[3];
        for (int k = 0; k < 3; ++k) {
            double m[3][3];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) m[r][c] = (c == k) ? jtr[r] : jtj[r][c];
            eps[k] = det3(m) / d;
        }
        std::array<std::array<double, 3>, 3> step{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double a = (r == c) ? 1.0 : 0.0;
                for (int k = 0; k < 3; ++k) a += eps[k] * basis[k][r][c];
                step[size_t(r)][size_t(c)] = a;
            }
        LorentzIsometry trial = LorentzIsometry::unchecked(step).compose(g).reprojected();
        double r = worst_residual(trial);
        if (r >= best) break;
        best = r;
        g = trial;
    }
    return g;
}

}  // namespace

FuchsianGroup side_pairing_generators(const MetricMesh& mesh, const FundamentalDomain& dom) {
    FuchsianGroup group;
    group.genus = mesh.genus;
    for (int i = 0; i < mesh.genus; ++i)
        for (const char* kind : {"a", "b"}) {
            std::string label = std::string(kind) + std::to_string(i + 1);
            const std::vector<HPoint>* src = nullptr;
            const std::vector<HPoint>* dst = nullptr;
            for (size_t s = 0; s < mesh.boundary.size(); ++s) {
                if (mesh.boundary[s].label == label) src = &dom.sides[s];
                if (mesh.boundary[s].label == label + "~") dst = &dom.sides[s];
            }
            if (!src || !dst) throw input_error("missing boundary side " + label);
            double len_src = 0.0, len_dst = 0.0;
            for (size_t t = 0; t + 1 < src->size(); ++t)
                len_src += hyperbolic_distance((*src)[t], (*src)[t + 1]);
            for (size_t t = 0; t + 1 < dst->size(); ++t)
                len_dst += hyperbolic_distance((*dst)[t], (*dst)[t + 1]);
            if (std::abs(len_src - len_dst) > 1e-6)
                throw geometry_error("paired sides differ in length for " + label);

            std::vector<HPoint> reversed(dst->rbegin(), dst->rend());
            LorentzIsometry g = align_pairs((*src).front(), (*src).back(), reversed.front(),
                                            reversed.back());
            g = refine_fit(g, *src, reversed);
            for (size_t t = 0; t < src->size(); ++t) {
                // Coordinate-relative residual: the metric readout cannot
                // resolve 1e-6 separations at large coordinates.
                Vec3m delta = g.apply((*src)[t].vec()) - reversed[t].vec();
                if (delta.max_norm() > 1e-6 * std::max(1.0, reversed[t].x3()))
                    throw geometry_error("side pairing residual too large for " + label);
            }
            group.gens.push_back(g);
            group.labels.push_back(label);
        }
    return group;
}

TilePatch enumerate_tiles(const FuchsianGroup& group, const FundamentalDomain& dom, int length) {
    if (length < 0) throw input_error("tiling depth must be nonnegative");
    TilePatch patch;
    patch.depth = length;
    patch.elements.push_back({LorentzIsometry(), {}});

    // Probes for "does this tile come near the domain": corners plus a
    // few points per boundary side. Tiles that stay far away cannot
    // bound any cell and would blow the word ball up exponentially.
    std::vector<HPoint> probes = dom.corner_outline.verts;
    size_t loop_n = dom.boundary_loop.size();
    size_t stride = std::max<size_t>(1, loop_n / (8 * dom.corner_outline.verts.size()));
    for (size_t i = 0; i < loop_n; i += stride) probes.push_back(dom.boundary_loop[i]);
    const double keep_dist = 3.0;

    std::vector<TileElement> frontier = patch.elements;
    for (int l = 1; l <= length; ++l) {
        std::vector<TileElement> next;
        for (const TileElement& e : frontier) {
            for (int letter = -group.alphabet_size() / 2; letter <= group.alphabet_size() / 2;
                 ++letter) {
                if (letter == 0) continue;
                if (!e.word.empty() && e.word.back() == -letter) continue;  // reduced words
                TileElement cand;
                cand.g = e.g.compose(group.letter(letter)).reprojected();
                cand.word = e.word;
                cand.word.push_back(letter);
                // Relator-equal words agree only up to the floating error
                // of their entries, so the threshold scales with them.
                double mag = 1.0;
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c)
                        mag = std::max(mag, std::abs(cand.g.entry(r, c)));
                double tol = 1e-8 * mag;
                bool dup = false;
                for (const TileElement& known : patch.elements)
                    if (known.g.max_diff(cand.g) < tol) {
                        dup = true;
                        break;
                    }
                for (const TileElement& known : next)
                    if (!dup && known.g.max_diff(cand.g) < tol) dup = true;
                if (dup) continue;
                bool near = false;
                for (const HPoint& p : probes) {
                    std::optional<HPoint> moved = apply_safe(cand.g, p);
                    if (!moved) continue;
                    if (dom.contains(*moved, 0.0) || dom.outside_distance(*moved) <= keep_dist) {
                        near = true;
                        break;
                    }
                }
                if (near) next.push_back(cand);
            }
        }
        patch.elements.insert(patch.elements.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return patch;
}

TilePatch build_tiling(const FuchsianGroup& group, const FundamentalDomain& dom, int length) {
    TilePatch patch = enumerate_tiles(group, dom, length);

    // Containment: a probe ring around every boundary sample must be
    // covered by tiles, corners included.
    std::vector<HPoint> samples;
    size_t n = dom.boundary_loop.size();
    for (size_t i = 0; i < n; ++i) {
        const HPoint& a = dom.boundary_loop[i];
        const HPoint& b = dom.boundary_loop[(i + 1) % n];
        samples.push_back(a);
        for (int t = 1; t < 4; ++t)
            samples.push_back(
                HPoint::from_vec(a.vec() + (b.vec() - a.vec()) * (double(t) / 4.0)));
    }
    const double probe_radius = 1e-3;
    for (const HPoint& s : samples) {
        for (int dir = 0; dir < 8; ++dir) {
            double ang = 2.0 * M_PI * dir / 8.0;
            Vec3m t1{std::cos(ang), std::sin(ang), 0.0};
            // Orthonormalize against s to get a unit tangent.
            double ip = lorentz_inner(s.vec(), t1);
            Vec3m t = t1 + s.vec() * ip;
            t = t * (1.0 / std::sqrt(lorentz_inner(t, t)));
            HPoint probe = geodesic_point(s, t, probe_radius);
            bool covered = false;
            for (const TileElement& e : patch.elements) {
                std::optional<HPoint> back = apply_safe(e.g.inverse(), probe);
                if (back && dom.contains(*back, 1e-9)) {
                    covered = true;
                    break;
                }
            }
            if (!covered)
                throw input_error("tiling depth " + std::to_string(length) +
                                  " does not enclose the domain");
        }
    }
    return patch;
}

TilePatch build_tiling_auto(const FuchsianGroup& group, const FundamentalDomain& dom,
                            int initial_length) {
    // A corner of the 4g-gon is surrounded by 4g tiles, so closing the
    // corner fans takes words up to length 2g.
    const int max_depth = std::max(4, 2 * group.genus);
    for (int l = initial_length; l <= max_depth; ++l) {
        try {
            return build_tiling(group, dom, l);
        } catch (const input_error&) {
            if (l == max_depth) throw;
        }
    }
    throw input_error("unreachable");
}

HPoint covering_reduce(const TilePatch& patch, const FundamentalDomain& dom, const HPoint& x) {
    if (dom.contains(x, 1e-9)) return x;  // exact idempotence on the closed domain
    for (const TileElement& e : patch.elements) {
        if (e.word.empty()) continue;
        std::optional<HPoint> back = apply_safe(e.g.inverse(), x);
        if (back && dom.contains(*back, 1e-9)) return *back;
    }
    throw input_error("point is outside the tiled patch");
}

SurfaceDiagramFactory::SurfaceDiagramFactory(std::vector<HPoint> canonical,
                                             const FundamentalDomain& dom, const TilePatch& patch,
                                             double total_area)
    : canonical_(std::move(canonical)), dom_(dom), total_area_(total_area) {
    for (const HPoint& b : dom_.boundary_loop)
        domain_radius_ = std::max(domain_radius_, hyperbolic_distance(b, HPoint()));

    // Mean spacing sets the initial collar width.
    double spacing = std::sqrt(total_area_ / double(canonical_.size()));
    base_collar_ = std::max(0.4, 5.0 * spacing);
    collar_hint_ = base_collar_;

    const double hard_cap = domain_radius_ + 3.0;
    for (size_t e = 1; e < patch.elements.size(); ++e) {
        const LorentzIsometry& g = patch.elements[e].g;
        for (size_t i = 0; i < canonical_.size(); ++i) {
            std::optional<HPoint> pos = apply_safe(g, canonical_[i]);
            if (!pos) continue;
            double quick = hyperbolic_distance(*pos, HPoint());
            if (quick > hard_cap + domain_radius_) continue;
            double dist = dom_.contains(*pos, 0.0) ? 0.0 : dom_.outside_distance(*pos);
            copies_.push_back({int(i), *pos, dist});
        }
    }
    std::sort(copies_.begin(), copies_.end(), [](const Copy& a, const Copy& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return a.canonical < b.canonical;
    });
}

DiagramBuild SurfaceDiagramFactory::operator()(const std::vector<double>& heights) const {
    if (heights.size() != canonical_.size()) throw input_error("heights size mismatch");
    double spread = 0.0;
    if (!heights.empty()) {
        auto [lo, hi] = std::minmax_element(heights.begin(), heights.end());
        spread = *hi - *lo;
    }
    double collar = std::max(collar_hint_, base_collar_ + spread);
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            DiagramBuild b = build_once(heights, collar);
            collar_hint_ = collar;
            return b;
        } catch (const geometry_error&) {
            if (copies_.empty() || collar > copies_.back().dist + 1.0) throw;
            collar *= 1.6;
        }
    }
    throw geometry_error("surface diagram collar verification failed");
}

DiagramBuild SurfaceDiagramFactory::build_once(const std::vector<double>& heights,
                                               double collar) const {
    size_t k = canonical_.size();
    std::vector<LiftedSite> sites;
    std::vector<int> canon;
    sites.reserve(k * 3);
    for (size_t i = 0; i < k; ++i) {
        sites.push_back({canonical_[i], heights[i]});
        canon.push_back(int(i));
    }
    double max_dist = 0.0;
    for (const Copy& c : copies_) {
        if (c.dist > collar) break;
        sites.push_back({c.pos, heights[size_t(c.canonical)]});
        canon.push_back(c.canonical);
        max_dist = std::max(max_dist, hyperbolic_distance(c.pos, HPoint()));
    }
    size_t real_count = sites.size();

    // Far guard ring: keeps the hull boundary away from real sites.
    double phi_min = *std::min_element(heights.begin(), heights.end());
    double phi_max = *std::max_element(heights.begin(), heights.end());
    double guard_radius = std::max(max_dist, domain_radius_ + collar) + 1.0;
    const int kGuards = 24;
    for (int gidx = 0; gidx < kGuards; ++gidx) {
        double ang = 2.0 * M_PI * (gidx + 0.5) / kGuards;
        Vec3m v{std::sinh(guard_radius) * std::cos(ang), std::sinh(guard_radius) * std::sin(ang),
                std::cosh(guard_radius)};
        sites.push_back({HPoint::from_vec(v), phi_min});
        canon.push_back(-1);
    }

    std::vector<int> order;
    order.reserve(sites.size());
    for (size_t i = real_count; i < sites.size(); ++i) order.push_back(int(i));
    std::vector<LiftedSite> reals(sites.begin(), sites.begin() + long(real_count));
    for (int i : hilbert_order(reals)) order.push_back(i);

    RegularTriangulation rt(sites, order);

    DiagramPair pair;
    pair.diagram.domain_area = total_area_;
    pair.diagram.sites.assign(sites.begin(), sites.begin() + long(real_count));
    pair.diagram.canonical.assign(canon.begin(), canon.begin() + long(real_count));

    std::vector<std::array<int, 3>> faces;
    for (const auto& f : rt.finite_faces())
        if (f.v[0] < int(real_count) && f.v[1] < int(real_count) && f.v[2] < int(real_count))
            faces.push_back({f.v[0], f.v[1], f.v[2]});

    const double margin = 1e-9;
    for (size_t i = 0; i < k; ++i) {
        PowerCell cell;
        cell.site = int(i);
        if (rt.hidden(int(i))) {
            cell.degenerate = true;
            pair.diagram.cells.push_back(std::move(cell));
            continue;
        }
        std::vector<int> ring = rt.star(int(i));
        bool bad = false;
        for (int t : ring)
            if (!rt.tri_is_finite(t)) bad = true;
        if (bad) throw geometry_error("canonical cell reached the hull boundary");
        std::vector<HPoint> duals;
        std::vector<int> nbrs;
        for (size_t r = 0; r < ring.size(); ++r) {
            auto tv = rt.tri_vertices(ring[r]);
            duals.push_back(rt.face_normal(tv[0], tv[1], tv[2]));
            // Shared ring vertex between this face and the next.
            auto tw = rt.tri_vertices(ring[(r + 1) % ring.size()]);
            int shared = -1;
            for (int x : tv)
                if (x != int(i))
                    for (int y : tw)
                        if (x == y) shared = x;
            nbrs.push_back(shared);
        }
        cell.poly.verts = std::move(duals);
        cell.edge_neighbor = std::move(nbrs);

        // Soundness of the pruning: no guard and no excluded copy can
        // undercut the owner anywhere in the cell.
        double own_max = 0.0, out_max = 0.0;
        for (const HPoint& v : cell.poly.verts) {
            own_max = std::max(own_max, power_value(v, canonical_[i], heights[i]));
            if (!dom_.contains(v, 0.0)) out_max = std::max(out_max, dom_.outside_distance(v));
            for (size_t gidx = real_count; gidx < sites.size(); ++gidx) {
                double pg = power_value(v, sites[gidx].center, sites[gidx].height);
                if (pg <= power_value(v, canonical_[i], heights[i]) * (1.0 + margin))
                    throw geometry_error("guard site intrudes into a canonical cell");
            }
        }
        double reach = collar - out_max;
        if (reach <= 0.0 || std::cosh(reach) * std::exp(-phi_max) <= own_max * (1.0 + margin))
            throw geometry_error("collar too small for cell verification");

        for (int nb : cell.edge_neighbor)
            if (nb < 0 || nb >= int(real_count))
                throw geometry_error("canonical cell touches a guard cell");
        if (cell.poly.area() < 1e-12) {
            cell.degenerate = true;
            cell.poly.verts.clear();
            cell.edge_neighbor.clear();
        }
        pair.diagram.cells.push_back(std::move(cell));
    }

    std::vector<std::pair<int, int>> edges;
    for (const PowerCell& c : pair.diagram.cells)
        for (int nb : c.edge_neighbor) {
            int a = c.site, b = pair.diagram.canonical[size_t(nb)];
            if (a > b) std::swap(a, b);
            edges.push_back({a, b});
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    pair.delaunay.edges = std::move(edges);
    pair.delaunay.triangles = std::move(faces);
    return make_build(std::move(pair));
}

}  // namespace hyperot
