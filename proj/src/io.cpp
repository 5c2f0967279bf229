#include "hyperot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hyperot {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw input_error("parse error in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<GeodesicCircle> load_sites(const std::string& path) {
    json j = parse_file(path);
    if (!j.contains("sites") || !j["sites"].is_array())
        throw input_error(path + ": missing sites array");
    std::vector<GeodesicCircle> out;
    for (const auto& s : j["sites"]) {
        if (!s.contains("u") || !s.contains("v"))
            throw input_error(path + ": site without coordinates");
        DiskPoint d{s["u"].get<double>(), s["v"].get<double>()};
        double r = s.value("r", 0.0);
        if (r < 0.0) throw input_error(path + ": negative radius");
        out.push_back({disk_to_hyperboloid(d), r});
    }
    return out;
}

void save_sites(const std::string& path, const std::vector<GeodesicCircle>& sites) {
    json j;
    j["sites"] = json::array();
    for (const GeodesicCircle& c : sites) {
        DiskPoint d = hyperboloid_to_disk(c.center);
        j["sites"].push_back({{"u", d.u}, {"v", d.v}, {"r", c.radius}});
    }
    write_text(path, j.dump(2) + "\n");
}

std::vector<double> load_target(const std::string& path) {
    json j = parse_file(path);
    if (!j.contains("nu") || !j["nu"].is_array()) throw input_error(path + ": missing nu array");
    std::vector<double> nu;
    for (const auto& v : j["nu"]) nu.push_back(v.get<double>());
    return nu;
}

MeshData load_mesh(const std::string& off_path, const std::string& sidecar_path) {
    MeshData data;
    std::ifstream in(off_path);
    if (!in) throw input_error("cannot open " + off_path);
    std::string tag;
    in >> tag;
    if (tag != "OFF") throw input_error(off_path + ": not an OFF file");
    int nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    if (!in || nv <= 0 || nf <= 0) throw input_error(off_path + ": bad counts");
    data.positions.resize(size_t(nv));
    for (int i = 0; i < nv; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        data.positions[size_t(i)] = {x, y};
    }
    data.mesh.vertex_count = nv;
    for (int f = 0; f < nf; ++f) {
        int deg, a, b, c;
        in >> deg >> a >> b >> c;
        if (deg != 3) throw input_error(off_path + ": non-triangular face");
        data.mesh.faces.push_back({{a, b, c}});
    }
    if (!in) throw input_error(off_path + ": truncated file");

    json j = parse_file(sidecar_path);
    if (!j.contains("genus")) throw input_error(sidecar_path + ": missing genus");
    data.mesh.genus = j["genus"].get<int>();
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw input_error(sidecar_path + ": bad edge entry");
        data.mesh.set_edge_len(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
    for (const auto& s : j.at("boundary")) {
        BoundarySide side;
        side.label = s.at("label").get<std::string>();
        for (const auto& v : s.at("vertices")) side.verts.push_back(v.get<int>());
        data.mesh.boundary.push_back(std::move(side));
    }
    data.mesh.finalize();
    return data;
}

void save_mesh(const std::string& off_path, const std::string& sidecar_path,
               const MetricMesh& mesh, const std::vector<HPoint>& positions) {
    std::ostringstream off;
    off << "OFF\n" << mesh.vertex_count << " " << mesh.faces.size() << " 0\n";
    for (const HPoint& p : positions) {
        DiskPoint d = hyperboloid_to_disk(p);
        off << fmt(d.u) << " " << fmt(d.v) << " 0\n";
    }
    for (const MeshFace& f : mesh.faces)
        off << "3 " << f.v[0] << " " << f.v[1] << " " << f.v[2] << "\n";
    write_text(off_path, off.str());

    json j;
    j["genus"] = mesh.genus;
    j["edges"] = json::array();
    for (const auto& [key, len] : mesh.edge_lengths)
        j["edges"].push_back({int(key >> 32), int(key & 0xffffffffu), len});
    j["boundary"] = json::array();
    for (const BoundarySide& s : mesh.boundary)
        j["boundary"].push_back({{"label", s.label}, {"vertices", s.verts}});
    write_text(sidecar_path, j.dump() + "\n");
}

DiagramDump make_dump(const DiagramBuild& build, const std::string& mode,
                      const std::vector<DiskPoint>& outline) {
    DiagramDump dump;
    dump.mode = mode;
    for (const LiftedSite& s : build.diagram.sites) {
        dump.site_disk.push_back(hyperboloid_to_disk(s.center));
        dump.site_phi.push_back(s.height);
    }
    for (size_t i = 0; i < build.diagram.cells.size(); ++i) {
        const PowerCell& c = build.diagram.cells[i];
        std::vector<DiskPoint> loop;
        for (const HPoint& v : c.poly.verts) loop.push_back(hyperboloid_to_disk(v));
        dump.cells.push_back(std::move(loop));
        dump.cell_site.push_back(c.site);
        dump.cell_degenerate.push_back(c.degenerate);
        dump.cell_area.push_back(c.degenerate ? 0.0 : build.omega[i]);
        std::vector<int> nbrs;
        for (int j : c.edge_neighbor)
            nbrs.push_back(j < 0 ? -1 : build.diagram.canonical[size_t(j)]);
        dump.cell_neighbors.push_back(std::move(nbrs));
    }
    dump.adjacency = build.delaunay.edges;
    dump.outline = outline;
    return dump;
}

std::string dump_to_json(const DiagramDump& dump) {
    json j;
    j["type"] = "hyperot-diagram";
    j["mode"] = dump.mode;
    auto pts = [](const std::vector<DiskPoint>& v) {
        json a = json::array();
        for (const DiskPoint& p : v) a.push_back({p.u, p.v});
        return a;
    };
    j["sites"] = json::array();
    for (size_t i = 0; i < dump.site_disk.size(); ++i)
        j["sites"].push_back(
            {{"u", dump.site_disk[i].u}, {"v", dump.site_disk[i].v}, {"phi", dump.site_phi[i]}});
    j["cells"] = json::array();
    for (size_t i = 0; i < dump.cells.size(); ++i)
        j["cells"].push_back({{"site", dump.cell_site[i]},
                              {"degenerate", bool(dump.cell_degenerate[i])},
                              {"area", dump.cell_area[i]},
                              {"vertices", pts(dump.cells[i])},
                              {"neighbors", dump.cell_neighbors[i]}});
    j["adjacency"] = json::array();
    for (auto [a, b] : dump.adjacency) j["adjacency"].push_back({a, b});
    j["outline"] = pts(dump.outline);
    j["centroids"] = pts(dump.centroids);
    j["extra_outlines"] = json::array();
    for (const auto& loop : dump.extra_outlines) j["extra_outlines"].push_back(pts(loop));
    return j.dump(2) + "\n";
}

DiagramDump dump_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("dump parse error: ") + e.what());
    }
    if (j.value("type", "") != "hyperot-diagram") throw input_error("not a diagram dump");
    DiagramDump dump;
    dump.mode = j.value("mode", "planar");
    auto pts = [](const json& a) {
        std::vector<DiskPoint> v;
        for (const auto& p : a) v.push_back({p[0].get<double>(), p[1].get<double>()});
        return v;
    };
    for (const auto& s : j.at("sites")) {
        dump.site_disk.push_back({s.at("u").get<double>(), s.at("v").get<double>()});
        dump.site_phi.push_back(s.value("phi", 0.0));
    }
    for (const auto& c : j.at("cells")) {
        dump.cells.push_back(pts(c.at("vertices")));
        dump.cell_site.push_back(c.at("site").get<int>());
        dump.cell_degenerate.push_back(c.value("degenerate", false));
        dump.cell_area.push_back(c.value("area", 0.0));
        std::vector<int> nbrs;
        for (const auto& n : c.at("neighbors")) nbrs.push_back(n.get<int>());
        dump.cell_neighbors.push_back(std::move(nbrs));
    }
    for (const auto& e : j.at("adjacency"))
        dump.adjacency.push_back({e[0].get<int>(), e[1].get<int>()});
    dump.outline = pts(j.at("outline"));
    dump.centroids = pts(j.value("centroids", json::array()));
    for (const auto& loop : j.value("extra_outlines", json::array()))
        dump.extra_outlines.push_back(pts(loop));
    return dump;
}

std::string convergence_csv(const std::vector<IterationRecord>& log) {
    std::ostringstream out;
    out << "iter,lambda,residual_inf,residual_l2,energy,millis\n";
    for (const IterationRecord& r : log)
        out << r.iter << "," << fmt(r.lambda) << "," << fmt(r.residual_inf) << ","
            << fmt(r.residual_l2) << "," << fmt(r.energy) << "," << fmt(r.millis) << "\n";
    return out.str();
}

namespace {

// Circular arc through two disk points orthogonal to the unit circle, or
// a straight segment when the chord passes through the origin.
std::string edge_path(const DiskPoint& p, const DiskPoint& q) {
    double det = 2.0 * (p.u * q.v - p.v * q.u);
    std::ostringstream out;
    if (std::abs(det) < 1e-12) {
        out << "M " << fmt(p.u) << " " << fmt(p.v) << " L " << fmt(q.u) << " " << fmt(q.v);
        return out.str();
    }
    double rp = 1.0 + p.norm2(), rq = 1.0 + q.norm2();
    double cu = (rp * q.v - rq * p.v) / det;
    double cv = (rq * p.u - rp * q.u) / det;
    double radius = std::sqrt(cu * cu + cv * cv - 1.0);
    double cross = (p.u - cu) * (q.v - cv) - (p.v - cv) * (q.u - cu);
    int sweep = cross > 0.0 ? 1 : 0;
    out << "M " << fmt(p.u) << " " << fmt(p.v) << " A " << fmt(radius) << " " << fmt(radius)
        << " 0 0 " << sweep << " " << fmt(q.u) << " " << fmt(q.v);
    return out.str();
}

}  // namespace

std::string render_svg(const DiagramDump& dump) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\" "
           "width=\"800\" height=\"800\">\n";
    svg << "<g transform=\"scale(1,-1)\">\n";
    svg << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"white\" stroke=\"black\" "
           "stroke-width=\"0.004\"/>\n";
    auto draw_loop = [&](const std::vector<DiskPoint>& loop, const char* color, double width) {
        for (size_t i = 0; i < loop.size(); ++i) {
            const DiskPoint& a = loop[i];
            const DiskPoint& b = loop[(i + 1) % loop.size()];
            svg << "<path d=\"" << edge_path(a, b) << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
        }
    };
    for (const auto& loop : dump.extra_outlines) draw_loop(loop, "#bbbbbb", 0.002);
    if (dump.outline.size() >= 2) draw_loop(dump.outline, "black", 0.005);
    for (const auto& loop : dump.cells)
        if (loop.size() >= 3) draw_loop(loop, "blue", 0.003);
    for (const DiskPoint& c : dump.centroids)
        svg << "<circle cx=\"" << fmt(c.u) << "\" cy=\"" << fmt(c.v)
            << "\" r=\"0.008\" fill=\"green\"/>\n";
    svg << "</g>\n</svg>\n";
    return svg.str();
}

std::string parametrization_json(const Parametrization& par) {
    json j;
    j["type"] = "hyperot-parametrization";
    j["vertices"] = json::array();
    for (size_t i = 0; i < par.points.size(); ++i)
        j["vertices"].push_back({{"u", par.disk[i].u},
                                 {"v", par.disk[i].v},
                                 {"nu", par.nu[i]},
                                 {"omega", par.omega[i]}});
    j["iterations"] = par.map.iterations;
    j["cost"] = par.map.cost;
    return j.dump(2) + "\n";
}

}  // namespace hyperot
