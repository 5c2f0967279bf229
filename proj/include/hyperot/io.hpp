#pragma once

#include <string>
#include <vector>

#include "hyperot/parametrize.hpp"
#include "hyperot/solver.hpp"

// File formats:
//   sites JSON     {"sites":[{"u":..,"v":..,"r":..}, ...]}  disk coords + radius
//   target JSON    {"nu":[..]}
//   metric sidecar {"genus":g,"edges":[[u,v,len],..],
//                   "boundary":[{"label":"a1","vertices":[..]},..]}
//   mesh OFF       vertex positions (disk coords, z ignored) + faces
//   diagram dump   JSON consumed by the renderer and golden tests
//   convergence    CSV "iter,lambda,residual_inf,residual_l2,energy,millis"
// All CSV/SVG numbers use 17 significant digits.

namespace hyperot {

std::vector<GeodesicCircle> load_sites(const std::string& path);
void save_sites(const std::string& path, const std::vector<GeodesicCircle>& sites);

std::vector<double> load_target(const std::string& path);

struct MeshData {
    MetricMesh mesh;
    std::vector<DiskPoint> positions;  // from the OFF file, may be empty
};

MeshData load_mesh(const std::string& off_path, const std::string& sidecar_path);
void save_mesh(const std::string& off_path, const std::string& sidecar_path,
               const MetricMesh& mesh, const std::vector<HPoint>& positions);

// Self-contained dump of a decomposition for rendering and goldens.
struct DiagramDump {
    std::string mode;  // "planar" or "surface"
    std::vector<DiskPoint> site_disk;
    std::vector<double> site_phi;
    std::vector<std::vector<DiskPoint>> cells;   // vertex loops, disk coords
    std::vector<int> cell_site;
    std::vector<bool> cell_degenerate;
    std::vector<double> cell_area;
    std::vector<std::vector<int>> cell_neighbors;
    std::vector<std::pair<int, int>> adjacency;
    std::vector<DiskPoint> centroids;            // optional
    std::vector<DiskPoint> outline;              // clip domain or fundamental domain
    std::vector<std::vector<DiskPoint>> extra_outlines;  // translated domains
};

DiagramDump make_dump(const DiagramBuild& build, const std::string& mode,
                      const std::vector<DiskPoint>& outline);

std::string dump_to_json(const DiagramDump& dump);
DiagramDump dump_from_json(const std::string& text);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

std::string convergence_csv(const std::vector<IterationRecord>& log);

// Poincare disk figure: unit circle, cell edges as circular arcs
// orthogonal to the boundary, centroids as green dots. Byte-deterministic.
std::string render_svg(const DiagramDump& dump);

std::string parametrization_json(const Parametrization& par);

}  // namespace hyperot
