#include "hyperot/cli.hpp"

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "hyperot/io.hpp"
#include "hyperot/synthetic.hpp"

namespace hyperot {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    double lambda0 = 0.5;
    double eps = 1e-6;
    int max_iters = 200;
    int tile_depth = 1;
    std::string target_mode = "euclidean-face-area";
    uint64_t seed = 0;
    std::string out_dir = ".";
};

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--lambda0", o.lambda0, "initial step size");
    cmd->add_option("--eps", o.eps, "residual threshold");
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
    cmd->add_option("--tile-depth", o.tile_depth, "initial tiling word length");
    cmd->add_option("--target-mode", o.target_mode,
                    "euclidean-face-area | hyperbolic-face-area | uniform | file");
    cmd->add_option("--seed", o.seed, "reserved for randomized targets");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

GeodesicPolygon default_domain(const std::vector<GeodesicCircle>& circles) {
    std::vector<HPoint> centers;
    for (const GeodesicCircle& c : circles) centers.push_back(c.center);
    GeodesicPolygon hull = convex_hull(centers);
    if (hull.empty()) throw geometry_error("sites do not span a two-dimensional domain");
    return hull;
}

std::vector<DiskPoint> outline_of(const GeodesicPolygon& poly) {
    std::vector<DiskPoint> out;
    for (const HPoint& p : poly.verts) out.push_back(hyperboloid_to_disk(p));
    return out;
}

// Target masses for the planar experiment: thirds of triangle areas over
// the Delaunay faces of the sites, in the requested area measure.
std::vector<double> planar_target(const std::vector<GeodesicCircle>& circles,
                                  const std::string& mode) {
    size_t k = circles.size();
    std::vector<double> nu(k, 0.0);
    if (mode == "uniform") {
        std::fill(nu.begin(), nu.end(), 1.0);
        return nu;
    }
    std::vector<LiftedSite> sites;
    for (const GeodesicCircle& c : circles) sites.push_back({c.center, 0.0});
    RegularTriangulation rt(sites, hilbert_order(sites));
    for (const auto& f : rt.finite_faces()) {
        double area;
        if (mode == "euclidean-face-area") {
            DiskPoint a = hyperboloid_to_disk(sites[size_t(f.v[0])].center);
            DiskPoint b = hyperboloid_to_disk(sites[size_t(f.v[1])].center);
            DiskPoint c = hyperboloid_to_disk(sites[size_t(f.v[2])].center);
            area = 0.5 * std::abs((b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u));
        } else if (mode == "hyperbolic-face-area") {
            const HPoint& a = sites[size_t(f.v[0])].center;
            const HPoint& b = sites[size_t(f.v[1])].center;
            const HPoint& c = sites[size_t(f.v[2])].center;
            area = triangle_area(hyperbolic_distance(b, c), hyperbolic_distance(a, c),
                                 hyperbolic_distance(a, b));
        } else {
            throw input_error("unknown target mode " + mode);
        }
        for (int v : f.v) nu[size_t(v)] += area / 3.0;
    }
    return nu;
}

std::vector<double> normalized_target(std::vector<double> nu, double mass, bool from_file) {
    double total = 0.0;
    for (double v : nu) {
        if (!(v > 0.0)) throw input_error("target masses must be positive");
        total += v;
    }
    double scale = mass / total;
    if (from_file && std::abs(scale - 1.0) > 0.01)
        throw input_error("target mass differs from the domain mass by more than 1%");
    if (std::abs(scale - 1.0) > 1e-15)
        std::cout << "target rescaled by " << scale << " to match the domain mass\n";
    for (double& v : nu) v *= scale;
    return nu;
}

int cmd_hpd(const std::string& sites_path, const CommonOpts& o) {
    std::vector<GeodesicCircle> circles = load_sites(sites_path);
    GeodesicPolygon domain = default_domain(circles);
    DiagramPair pair = build_power_diagram(circles, domain);
    DiagramBuild build = make_build(std::move(pair));
    DiagramDump dump = make_dump(build, "planar", outline_of(domain));
    write_text(out_path(o, "diagram.json"), dump_to_json(dump));
    write_text(out_path(o, "diagram.svg"), render_svg(dump));
    return 0;
}

int cmd_solve(const std::string& sites_path, const std::string& target_path,
              const CommonOpts& o) {
    std::vector<GeodesicCircle> circles = load_sites(sites_path);
    GeodesicPolygon domain = default_domain(circles);
    double mass = domain.area();

    std::vector<HPoint> centers;
    for (const GeodesicCircle& c : circles) centers.push_back(c.center);

    std::vector<double> raw;
    bool from_file = !target_path.empty();
    if (from_file)
        raw = load_target(target_path);
    else
        raw = planar_target(circles, o.target_mode);
    if (raw.size() != circles.size()) throw input_error("target size does not match sites");
    TargetMeasure nu{normalized_target(std::move(raw), mass, from_file)};

    DiagramFactory factory = [&](const std::vector<double>& phi) {
        return make_build(build_planar_diagram(centers, phi, domain));
    };

    SolveConfig cfg;
    cfg.lambda0 = o.lambda0;
    cfg.eps = o.eps;
    cfg.max_iters = o.max_iters;

    DiagramBuild before = factory(std::vector<double>(circles.size(), 0.0));
    DiagramDump before_dump = make_dump(before, "planar", outline_of(domain));
    write_text(out_path(o, "before.svg"), render_svg(before_dump));

    TransportMap map;
    try {
        map = damped_newton(factory, nu, cfg);
    } catch (const nonconvergence_error& e) {
        write_text(out_path(o, "convergence.csv"), convergence_csv(e.log));
        std::cerr << "solve did not converge: " << e.what() << "\n";
        return 4;
    }
    write_text(out_path(o, "convergence.csv"), convergence_csv(map.log));

    DiagramDump dump = make_dump(map.build, "planar", outline_of(domain));
    for (const PowerCell& cell : map.build.diagram.cells)
        if (!cell.degenerate) dump.centroids.push_back(hyperboloid_to_disk(cell.poly.centroid()));
    write_text(out_path(o, "map.json"), dump_to_json(dump));
    write_text(out_path(o, "after.svg"), render_svg(dump));
    std::cout << "converged in " << map.iterations << " iterations, cost " << map.cost << "\n";
    return 0;
}

int cmd_parametrize(const std::string& mesh_path, const std::string& sidecar_path,
                    const CommonOpts& o) {
    MeshData data = load_mesh(mesh_path, sidecar_path);

    std::vector<double> face_weights;
    if (o.target_mode == "euclidean-face-area") {
        if (data.positions.empty()) throw input_error("mesh file carries no positions");
        for (const MeshFace& f : data.mesh.faces) {
            const DiskPoint& a = data.positions[size_t(f.v[0])];
            const DiskPoint& b = data.positions[size_t(f.v[1])];
            const DiskPoint& c = data.positions[size_t(f.v[2])];
            face_weights.push_back(
                0.5 * std::abs((b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u)));
        }
    } else if (o.target_mode == "uniform") {
        face_weights.assign(data.mesh.faces.size(), 1.0);
    }  // hyperbolic-face-area: leave empty for the pipeline default

    ParametrizeConfig cfg;
    cfg.solve.lambda0 = o.lambda0;
    cfg.solve.eps = o.eps;
    cfg.solve.max_iters = o.max_iters;
    cfg.tile_depth = o.tile_depth;

    Parametrization par;
    try {
        par = parametrize(data.mesh, cfg, std::move(face_weights));
    } catch (const nonconvergence_error& e) {
        write_text(out_path(o, "convergence.csv"), convergence_csv(e.log));
        std::cerr << "solve did not converge: " << e.what() << "\n";
        return 4;
    }
    write_text(out_path(o, "convergence.csv"), convergence_csv(par.map.log));
    write_text(out_path(o, "parametrization.json"), parametrization_json(par));

    // Companion mesh with the parameter positions as texture coordinates.
    if (!data.positions.empty()) {
        std::ostringstream obj;
        char buf[80];
        for (const DiskPoint& p : data.positions) {
            std::snprintf(buf, sizeof(buf), "v %.17g %.17g 0\n", p.u, p.v);
            obj << buf;
        }
        for (int v = 0; v < data.mesh.vertex_count; ++v) {
            const DiskPoint& t = par.disk[size_t(data.mesh.surface_vertex[size_t(v)])];
            std::snprintf(buf, sizeof(buf), "vt %.17g %.17g\n", t.u, t.v);
            obj << buf;
        }
        for (const MeshFace& f : data.mesh.faces)
            obj << "f " << f.v[0] + 1 << "/" << f.v[0] + 1 << " " << f.v[1] + 1 << "/"
                << f.v[1] + 1 << " " << f.v[2] + 1 << "/" << f.v[2] + 1 << "\n";
        write_text(out_path(o, "textured.obj"), obj.str());
    }

    std::vector<DiskPoint> outline;
    for (const HPoint& p : par.dom.boundary_loop) outline.push_back(hyperboloid_to_disk(p));
    DiagramDump dump = make_dump(par.map.build, "surface", outline);
    dump.centroids = par.disk;
    write_text(out_path(o, "domain.json"), dump_to_json(dump));
    write_text(out_path(o, "domain.svg"), render_svg(dump));

    // Universal-cover view: translated domain outlines behind the cells.
    DiagramDump tiled = dump;
    for (size_t e = 1; e < par.patch.elements.size(); ++e) {
        std::vector<DiskPoint> loop;
        for (const HPoint& p : par.dom.boundary_loop)
            loop.push_back(hyperboloid_to_disk(
                HPoint::from_vec(par.patch.elements[e].g.apply(p.vec()))));
        tiled.extra_outlines.push_back(std::move(loop));
    }
    write_text(out_path(o, "cover.svg"), render_svg(tiled));
    std::cout << "parametrized " << par.points.size() << " vertices in " << par.map.iterations
              << " iterations\n";
    return 0;
}

int cmd_render(const std::string& dump_path, const std::string& out) {
    DiagramDump dump = dump_from_json(read_text(dump_path));
    write_text(out, render_svg(dump));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"semi-discrete optimal transport on the hyperbolic plane and closed "
                 "hyperbolic surfaces"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string sites_path, target_path, mesh_path, sidecar_path, dump_path, out_path_render;

    CLI::App* hpd = app.add_subcommand("hpd", "power diagram of weighted sites");
    hpd->add_option("--sites", sites_path, "sites JSON")->required();
    add_solver_flags(hpd, o);

    CLI::App* solve = app.add_subcommand("solve", "transport map on the disk");
    solve->add_option("--sites", sites_path, "sites JSON")->required();
    solve->add_option("--target", target_path, "target JSON (overrides --target-mode)");
    add_solver_flags(solve, o);

    CLI::App* par = app.add_subcommand("parametrize", "area-preserving surface parametrization");
    par->add_option("--mesh", mesh_path, "OFF mesh")->required();
    par->add_option("--metric", sidecar_path, "metric sidecar JSON")->required();
    add_solver_flags(par, o);

    CLI::App* render = app.add_subcommand("render", "re-render a diagram dump");
    render->add_option("--dump", dump_path, "diagram dump JSON")->required();
    render->add_option("--out", out_path_render, "output SVG")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (hpd->parsed()) return cmd_hpd(sites_path, o);
        if (solve->parsed()) return cmd_solve(sites_path, target_path, o);
        if (par->parsed()) return cmd_parametrize(mesh_path, sidecar_path, o);
        if (render->parsed()) return cmd_render(dump_path, out_path_render);
    } catch (const nonconvergence_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const geometry_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace hyperot
