#pragma once

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hyperot/diagram.hpp"

// Shared oracles for the test suites. Everything here is independent of
// the construction paths it checks: brute-force enumeration, quadrature,
// dense linear algebra.

namespace testsup {

using namespace hyperot;

// Coordinate deviation between two sheet points. The inner-product
// distance readout floors near 2e-8 for ulp-separated points; this is the
// faithful small-separation metric.
inline double coordinate_distance(const HPoint& p, const HPoint& q) {
    return (p.vec() - q.vec()).max_norm() / std::max(1.0, p.x3());
}

inline HPoint random_point(std::mt19937_64& rng, double max_dist) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Uniform w.r.t. hyperbolic area on the disk of radius max_dist.
    double r = std::acosh(1.0 + unit(rng) * (std::cosh(max_dist) - 1.0));
    double a = ang(rng);
    return HPoint::from_vec({std::sinh(r) * std::cos(a), std::sinh(r) * std::sin(a), std::cosh(r)});
}

// Adaptive triangle quadrature of the hyperbolic area measure against f,
// by uniform 4-way refinement in the Klein chart.
inline double refine_integrate(const HPoint& a, const HPoint& b, const HPoint& c,
                               const std::function<double(const HPoint&)>& f, int depth) {
    if (depth == 0) return integrate_triangle(a, b, c, f);
    HPoint ab = HPoint::from_vec(a.vec() + b.vec());
    HPoint bc = HPoint::from_vec(b.vec() + c.vec());
    HPoint ca = HPoint::from_vec(c.vec() + a.vec());
    return refine_integrate(a, ab, ca, f, depth - 1) + refine_integrate(ab, b, bc, f, depth - 1) +
           refine_integrate(ca, bc, c, f, depth - 1) + refine_integrate(ab, bc, ca, f, depth - 1);
}

// O(n^4) hull oracle: (i,j,k) is an origin-facing hull face iff no other
// lifted point is strictly on the origin side of its plane.
inline std::vector<std::array<int, 3>> brute_hull_faces(const std::vector<LiftedSite>& sites) {
    int n = int(sites.size());
    std::vector<Vec3m> z(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) z[size_t(i)] = sites[size_t(i)].lifted();
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Vec3m e1 = z[size_t(j)] - z[size_t(i)];
                Vec3m e2 = z[size_t(k)] - z[size_t(i)];
                double scale = std::max(e1.max_norm() * e2.max_norm(), 1e-30);
                double origin_det = triple_det(-1.0 * z[size_t(i)], e1, e2);
                if (std::abs(origin_det) <= 1e-11 * scale * z[size_t(i)].max_norm())
                    continue;  // plane through the origin: not a face
                int origin_sign = origin_det > 0.0 ? 1 : -1;
                bool ok = true;
                for (int s = 0; s < n && ok; ++s) {
                    if (s == i || s == j || s == k) continue;
                    Vec3m d = z[size_t(s)] - z[size_t(i)];
                    double det = triple_det(d, e1, e2);
                    if (std::abs(det) <= 1e-11 * scale * std::max(d.max_norm(), 1e-30))
                        continue;  // cocircular tie: either triangulation valid
                    if ((det > 0.0 ? 1 : -1) == origin_sign) ok = false;
                }
                if (ok) faces.push_back({i, j, k});
            }
    return faces;
}

// Dense symmetric eigensolver (Jacobi rotations), for structure checks.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-24) break;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (size_t i = 0; i < n; ++i) eig[i] = a[i][i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Random weighted-site instances whose diagram has no sliver features, so
// relative comparisons against finite differences are well posed.
struct RobustInstance {
    std::vector<HPoint> centers;
    std::vector<double> heights;
    GeodesicPolygon domain;
};

inline RobustInstance robust_instance(uint64_t seed, int k, double max_height = 0.25) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> h(-max_height, max_height);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<HPoint> centers;
        while (int(centers.size()) < k) {
            HPoint p = random_point(rng, 1.6);
            bool ok = true;
            for (const HPoint& q : centers)
                if (hyperbolic_distance(p, q) < 0.45) ok = false;
            if (ok) centers.push_back(p);
        }
        std::vector<double> heights(static_cast<size_t>(k));
        for (double& v : heights) v = h(rng);
        GeodesicPolygon domain;
        {
            std::vector<HPoint> ring;
            for (int i = 0; i < 12; ++i) {
                double a = 2.0 * M_PI * i / 12.0;
                ring.push_back(HPoint::from_vec(
                    {std::sinh(2.2) * std::cos(a), std::sinh(2.2) * std::sin(a), std::cosh(2.2)}));
            }
            domain.verts = ring;
        }
        DiagramPair pair = build_planar_diagram(centers, heights, domain);
        bool good = true;
        double min_edge = 1e9, min_area = 1e9;
        for (const PowerCell& c : pair.diagram.cells) {
            if (c.degenerate) {
                good = false;
                break;
            }
            min_area = std::min(min_area, c.poly.area());
            size_t m = c.poly.verts.size();
            for (size_t e = 0; e < m; ++e) {
                if (c.edge_neighbor[e] < 0) continue;
                min_edge = std::min(min_edge, hyperbolic_distance(c.poly.verts[e],
                                                                  c.poly.verts[(e + 1) % m]));
            }
        }
        if (good && min_edge > 0.03 && min_area > 0.02)
            return {std::move(centers), std::move(heights), std::move(domain)};
    }
    throw std::runtime_error("no robust instance found");
}

}  // namespace testsup
