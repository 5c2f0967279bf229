#pragma once

#include <cstdint>

#include "hyperot/fuchsian.hpp"

// Deterministic fixture generators: the evenly spaced disk lattice and
// polygon-based multi-genus metric meshes.

namespace hyperot {

// Hexagonal lattice in disk coordinates: 1 + 6 + 12 + ... points,
// outermost ring at the given Euclidean radius. rings = 4 gives 61.
std::vector<DiskPoint> hex_disk_sites(int rings = 4, double outer_radius = 0.8);

// Corners of the regular 4g-gon whose side pairing closes up a genus-g
// surface: equal sides, corner angles summing to 2 pi.
std::vector<HPoint> regular_fundamental_polygon(int genus);

// Perturbed corner polygon re-projected onto the pairing constraints
// (paired sides equal, angle sum 2 pi). magnitude ~ 0.03 stays convex.
std::vector<HPoint> irregular_fundamental_polygon(int genus, uint64_t seed,
                                                  double magnitude = 0.03);

struct SyntheticSurface {
    MetricMesh mesh;
    std::vector<HPoint> positions;  // generating embedding, per cut vertex
};

// Poisson-sampled triangulation of the polygon interior with matched
// boundary subdivisions. `spacing` is the dart radius.
SyntheticSurface make_polygon_surface(const std::vector<HPoint>& corners, int genus,
                                      double spacing, uint64_t seed);

// Picks a spacing to land near the requested surface vertex count.
SyntheticSurface make_surface(int genus, int target_vertices, uint64_t seed,
                              bool irregular = false);

}  // namespace hyperot
