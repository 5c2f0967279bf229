#pragma once

#include "hyperot/fuchsian.hpp"
#include "hyperot/solver.hpp"

// Area-preserving parametrization of a genus g > 1 metric mesh: embed the
// cut-open surface, solve the transport problem with per-vertex targets,
// and read cell centers back as parameter positions.

namespace hyperot {

// Uniform rescale of per-face weights so they total 2 pi (2g - 2).
std::vector<double> scale_to_gauss_bonnet(const std::vector<double>& face_weights, int genus);

// One third of each incident face weight per surface vertex.
TargetMeasure vertex_measure(const MetricMesh& mesh, const std::vector<double>& face_weights);

HPoint cell_centroid(const PowerCell& cell);

struct ParametrizeConfig {
    SolveConfig solve;
    int tile_depth = 1;  // auto-raised until the tiling closes
};

struct Parametrization {
    std::vector<HPoint> points;    // cell center per surface vertex
    std::vector<DiskPoint> disk;   // the same in disk coordinates
    std::vector<double> nu;
    std::vector<double> omega;
    TransportMap map;
    FundamentalDomain dom;
    TilePatch patch;
    std::vector<int> canonical_cut_vertex;  // representative cut vertex per surface vertex
};

// face_weights empty: hyperbolic face areas from the metric.
Parametrization parametrize(const MetricMesh& mesh, const ParametrizeConfig& cfg,
                            std::vector<double> face_weights = {});

}  // namespace hyperot
