#include <doctest.h>

#include <random>

#include "hyperot/synthetic.hpp"
#include "test_support.hpp"

using namespace hyperot;

namespace {

SyntheticSurface& octagon_surface() {
    static SyntheticSurface surf = make_surface(2, 260, 7);
    return surf;
}

}  // namespace

TEST_CASE("fundamental polygons") {
    SUBCASE("regular octagon") {
        auto corners = regular_fundamental_polygon(2);
        REQUIRE(corners.size() == 8);
        GeodesicPolygon poly;
        poly.verts = corners;
        // Angle-sum closure: area is exactly 2 pi (2g - 2).
        CHECK(poly.area() == doctest::Approx(4.0 * M_PI).epsilon(1e-12));
        double side0 = hyperbolic_distance(corners[0], corners[1]);
        for (size_t i = 0; i < 8; ++i)
            CHECK(hyperbolic_distance(corners[i], corners[(i + 1) % 8]) ==
                  doctest::Approx(side0).epsilon(1e-12));
    }
    SUBCASE("irregular octagon satisfies the pairing constraints") {
        auto corners = irregular_fundamental_polygon(2, 99);
        REQUIRE(corners.size() == 8);
        GeodesicPolygon poly;
        poly.verts = corners;
        CHECK(poly.area() == doctest::Approx(4.0 * M_PI).epsilon(1e-9));
        auto side = [&](int s) {
            return hyperbolic_distance(corners[size_t(s)], corners[size_t((s + 1) % 8)]);
        };
        CHECK(side(0) == doctest::Approx(side(2)).epsilon(1e-10));
        CHECK(side(1) == doctest::Approx(side(3)).epsilon(1e-10));
        CHECK(side(4) == doctest::Approx(side(6)).epsilon(1e-10));
        CHECK(side(5) == doctest::Approx(side(7)).epsilon(1e-10));
        // Genuinely irregular.
        CHECK(std::abs(side(0) - side(1)) > 1e-3);
    }
    SUBCASE("genus three 12-gon") {
        auto corners = regular_fundamental_polygon(3);
        REQUIRE(corners.size() == 12);
        GeodesicPolygon poly;
        poly.verts = corners;
        CHECK(poly.area() == doctest::Approx(8.0 * M_PI).epsilon(1e-12));
    }
}

TEST_CASE("synthetic mesh is a valid metric mesh") {
    const SyntheticSurface& surf = octagon_surface();
    const MetricMesh& mesh = surf.mesh;
    CHECK(mesh.genus == 2);
    CHECK(mesh.surface_vertex_count > 150);
    // Total angle-deficit area obeys the total-curvature identity.
    CHECK(mesh.metric_area() == doctest::Approx(4.0 * M_PI).epsilon(1e-6));
    // Paired sides carry identical subdivision lengths.
    for (size_t s = 0; s < mesh.boundary.size(); ++s) {
        const BoundarySide& side = mesh.boundary[s];
        if (side.label.back() == '~') continue;
        const BoundarySide* partner = nullptr;
        for (const BoundarySide& o : mesh.boundary)
            if (o.label == side.label + "~") partner = &o;
        REQUIRE(partner != nullptr);
        size_t m = side.verts.size();
        REQUIRE(partner->verts.size() == m);
        for (size_t t = 0; t + 1 < m; ++t) {
            double a = mesh.edge_len(side.verts[t], side.verts[t + 1]);
            double b = mesh.edge_len(partner->verts[m - 2 - t], partner->verts[m - 1 - t]);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("embedding realizes the metric") {
    const SyntheticSurface& surf = octagon_surface();
    FundamentalDomain dom = embed_domain(surf.mesh);

    SUBCASE("seed placement") {
        // The seed face anchors the development: its first corner at the
        // apex, its second on the x1 axis branch at the edge length.
        bool found = false;
        for (const MeshFace& f : surf.mesh.faces) {
            const HPoint& t0 = dom.tau[size_t(f.v[0])];
            if (std::abs(t0.x1()) > 1e-15 || std::abs(t0.x2()) > 1e-15) continue;
            const HPoint& t1 = dom.tau[size_t(f.v[1])];
            CHECK(std::abs(t1.x2()) < 1e-15);
            CHECK(hyperbolic_distance(t0, t1) ==
                  doctest::Approx(surf.mesh.edge_len(f.v[0], f.v[1])).epsilon(1e-12));
            found = true;
            break;
        }
        CHECK(found);
    }

    SUBCASE("every edge length is realized") {
        double worst = 0.0;
        for (const auto& [key, len] : surf.mesh.edge_lengths) {
            int u = int(key >> 32), v = int(key & 0xffffffffu);
            worst = std::max(worst,
                             std::abs(hyperbolic_distance(dom.tau[size_t(u)],
                                                          dom.tau[size_t(v)]) -
                                      len));
        }
        CHECK(worst < 1e-7);
    }

    SUBCASE("boundary is a 4g-gon of sides") {
        CHECK(dom.sides.size() == 8);
        CHECK(dom.corner_outline.verts.size() == 8);
    }

    SUBCASE("regular metric embeds with the symmetry of the metric") {
        // All corner copies are equidistant from the centroid of the domain
        // for the regular octagon construction.
        std::vector<double> corner_r;
        for (const HPoint& c : dom.corner_outline.verts)
            corner_r.push_back(hyperbolic_distance(c, dom.tau[size_t(
                surf.mesh.faces[0].v[0])]));
        // Side lengths all agree.
        double s0 = hyperbolic_distance(dom.corner_outline.verts[0],
                                        dom.corner_outline.verts[1]);
        for (size_t i = 0; i < 8; ++i)
            CHECK(hyperbolic_distance(dom.corner_outline.verts[i],
                                      dom.corner_outline.verts[(i + 1) % 8]) ==
                  doctest::Approx(s0).epsilon(1e-9));
    }

    SUBCASE("metric violating the triangle inequality is rejected") {
        MetricMesh broken = surf.mesh;
        const MeshFace& f = broken.faces[10];
        broken.set_edge_len(f.v[0], f.v[1],
                            broken.edge_len(f.v[0], f.v[2]) +
                                broken.edge_len(f.v[1], f.v[2]) + 1.0);
        CHECK_THROWS_AS(embed_domain(broken), geometry_error);
    }
}

TEST_CASE("side pairing generators") {
    const SyntheticSurface& surf = octagon_surface();
    FundamentalDomain dom = embed_domain(surf.mesh);
    FuchsianGroup group = side_pairing_generators(surf.mesh, dom);
    REQUIRE(group.gens.size() == 4);

    SUBCASE("isometry invariant") {
        for (const LorentzIsometry& g : group.gens) CHECK(g.orthogonality_defect() <= 1e-8);
    }

    SUBCASE("endpoint mapping residuals") {
        for (size_t s = 0; s < surf.mesh.boundary.size(); ++s) {
            const BoundarySide& side = surf.mesh.boundary[s];
            if (side.label.back() == '~') continue;
            size_t gi = 0;
            for (size_t k = 0; k < group.labels.size(); ++k)
                if (group.labels[k] == side.label) gi = k;
            const BoundarySide* partner = nullptr;
            for (const BoundarySide& o : surf.mesh.boundary)
                if (o.label == side.label + "~") partner = &o;
            size_t m = side.verts.size();
            for (size_t t = 0; t < m; ++t) {
                HPoint image = group.gens[gi].apply(dom.tau[size_t(side.verts[t])]);
                HPoint want = dom.tau[size_t(partner->verts[m - 1 - t])];
                CHECK(hyperbolic_distance(image, want) < 1e-6);
            }
        }
    }

    SUBCASE("single relator is satisfied") {
        // Tile chain around the corner cycle: crossing the eight wedges
        // composes to the identity. With the side pairing used here the
        // word is a^-1 b a b^-1 c^-1 d c d^-1.
        LorentzIsometry r;
        for (int m = 0; m < 2; ++m) {
            const LorentzIsometry& a = group.gens[size_t(2 * m)];
            const LorentzIsometry& b = group.gens[size_t(2 * m + 1)];
            r = r.compose(a.inverse()).compose(b).compose(a).compose(b.inverse());
        }
        CHECK(r.max_diff(LorentzIsometry()) < 1e-5);
    }
}

TEST_CASE("tiling") {
    const SyntheticSurface& surf = octagon_surface();
    FundamentalDomain dom = embed_domain(surf.mesh);
    FuchsianGroup group = side_pairing_generators(surf.mesh, dom);

    SUBCASE("word counting") {
        // Depth zero enumerates just the identity; its patch is the
        // domain alone, which never encloses the closure.
        TilePatch zero = enumerate_tiles(group, dom, 0);
        CHECK(zero.elements.size() == 1);
        CHECK(zero.elements[0].word.empty());
        CHECK_THROWS_AS(build_tiling(group, dom, 0), input_error);

        // Depth one: identity plus at most 4g distinct side neighbors.
        TilePatch one = enumerate_tiles(group, dom, 1);
        CHECK(one.elements.size() <= 9);
        CHECK(one.elements.size() >= 5);

        CHECK_THROWS_AS(build_tiling(group, dom, 1), input_error);  // corners uncovered
        TilePatch patch = build_tiling_auto(group, dom, 1);
        CHECK(patch.depth == 4);  // the corner cycle needs length-4 words
        CHECK(patch.elements.size() > 100);
        CHECK(patch.elements[0].word.empty());
    }

    SUBCASE("covering reduce round trips") {
        TilePatch patch = build_tiling_auto(group, dom, 1);
        std::mt19937_64 rng(55);
        // Interior points are fixed exactly.
        for (int t = 0; t < 50; ++t) {
            HPoint p = testsup::random_point(rng, 0.5);
            if (!dom.contains(p, 0.0)) continue;
            CHECK(testsup::coordinate_distance(covering_reduce(patch, dom, p), p) == 0.0);
        }
        // Translated interior points in the working range of the covering
        // reduction (the collar of tiles around the domain) come back.
        // The conditioning of a there-and-back ride grows like e^{2d}, so
        // far tiles cannot beat 1e-8 in double precision.
        int done = 0;
        for (int t = 0; t < 5000 && done < 60; ++t) {
            HPoint p = testsup::random_point(rng, 1.2);
            if (!dom.contains(p, 0.0) || dom.outside_distance(p) < 1e-3) continue;
            const TileElement& e = patch.elements[size_t(1 + t % (patch.elements.size() - 1))];
            std::optional<HPoint> moved = apply_safe(e.g, p);
            if (!moved || moved->x3() > std::cosh(7.5)) continue;
            HPoint back = covering_reduce(patch, dom, *moved);
            CHECK(testsup::coordinate_distance(back, p) < 1e-8);
            ++done;
        }
        CHECK(done > 20);
    }

    SUBCASE("points outside the patch are rejected") {
        TilePatch patch = build_tiling_auto(group, dom, 1);
        HPoint far = HPoint::from_vec({std::sinh(12.0), 0.0, std::cosh(12.0)});
        CHECK_THROWS_AS(covering_reduce(patch, dom, far), input_error);
    }
}

TEST_CASE("group elements stay on the isometry manifold") {
    const SyntheticSurface& surf = octagon_surface();
    FundamentalDomain dom = embed_domain(surf.mesh);
    FuchsianGroup group = side_pairing_generators(surf.mesh, dom);
    TilePatch patch = build_tiling_auto(group, dom, 1);
    for (const LorentzIsometry& g : group.gens) CHECK(g.orthogonality_defect() <= 1e-8);
    for (const TileElement& e : patch.elements) {
        // Long words have entries of size e^d; the representational floor
        // of the defect grows with the squared magnitude.
        double scale = 1.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) scale = std::max(scale, std::abs(e.g.entry(r, c)));
        CHECK(e.g.orthogonality_defect() <= 1e-8 * scale * scale);
    }
}
