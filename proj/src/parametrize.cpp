#include "hyperot/parametrize.hpp"

#include <cmath>
#include <numeric>

namespace hyperot {

std::vector<double> scale_to_gauss_bonnet(const std::vector<double>& face_weights, int genus) {
    if (genus < 2) throw input_error("genus must be at least 2");
    double total = std::accumulate(face_weights.begin(), face_weights.end(), 0.0);
    if (!(total > 0.0)) throw input_error("mesh has no area");
    double want = 2.0 * M_PI * (2.0 * genus - 2.0);
    std::vector<double> out(face_weights);
    double s = want / total;
    for (double& w : out) w *= s;
    return out;
}

TargetMeasure vertex_measure(const MetricMesh& mesh, const std::vector<double>& face_weights) {
    if (face_weights.size() != mesh.faces.size()) throw input_error("face weight size mismatch");
    TargetMeasure nu;
    nu.nu.assign(size_t(mesh.surface_vertex_count), 0.0);
    for (size_t f = 0; f < mesh.faces.size(); ++f)
        for (int k = 0; k < 3; ++k)
            nu.nu[size_t(mesh.surface_vertex[size_t(mesh.faces[f].v[k])])] +=
                face_weights[f] / 3.0;
    for (double v : nu.nu)
        if (!(v > 0.0)) throw input_error("isolated vertex: zero measure");
    return nu;
}

HPoint cell_centroid(const PowerCell& cell) {
    if (cell.degenerate) throw geometry_error("centroid of a degenerate cell");
    return cell.poly.centroid();
}

Parametrization parametrize(const MetricMesh& mesh, const ParametrizeConfig& cfg,
                            std::vector<double> face_weights) {
    Parametrization out;
    out.dom = embed_domain(mesh);
    FuchsianGroup group = side_pairing_generators(mesh, out.dom);
    out.patch = build_tiling_auto(group, out.dom, cfg.tile_depth);

    if (face_weights.empty()) {
        face_weights.reserve(mesh.faces.size());
        for (const MeshFace& f : mesh.faces) face_weights.push_back(mesh.face_area(f));
    }
    face_weights = scale_to_gauss_bonnet(face_weights, mesh.genus);
    TargetMeasure nu = vertex_measure(mesh, face_weights);

    out.canonical_cut_vertex.assign(size_t(mesh.surface_vertex_count), -1);
    for (int v = 0; v < mesh.vertex_count; ++v) {
        int sv = mesh.surface_vertex[size_t(v)];
        if (out.canonical_cut_vertex[size_t(sv)] < 0) out.canonical_cut_vertex[size_t(sv)] = v;
    }
    std::vector<HPoint> sites;
    sites.reserve(size_t(mesh.surface_vertex_count));
    for (int sv = 0; sv < mesh.surface_vertex_count; ++sv)
        sites.push_back(out.dom.tau[size_t(out.canonical_cut_vertex[size_t(sv)])]);

    double total_area = 2.0 * M_PI * (2.0 * mesh.genus - 2.0);
    SurfaceDiagramFactory factory(sites, out.dom, out.patch, total_area);
    out.map = damped_newton(factory, nu, cfg.solve);

    out.nu = nu.nu;
    out.omega = out.map.build.omega;
    out.points.reserve(sites.size());
    out.disk.reserve(sites.size());
    for (const PowerCell& cell : out.map.build.diagram.cells) {
        HPoint c = cell_centroid(cell);
        out.points.push_back(c);
        out.disk.push_back(hyperboloid_to_disk(c));
    }
    return out;
}

}  // namespace hyperot
