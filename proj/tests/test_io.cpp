#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "hyperot/cli.hpp"
#include "hyperot/io.hpp"
#include "hyperot/synthetic.hpp"

using namespace hyperot;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hyperot_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter() {
        static int c = 0;
        return c++;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<GeodesicCircle> lattice_sites() {
    std::vector<GeodesicCircle> sites;
    for (const DiskPoint& p : hex_disk_sites(2, 0.5)) sites.push_back({disk_to_hyperboloid(p), 0.0});
    return sites;
}

}  // namespace

TEST_CASE("sites round trip") {
    TempDir dir;
    std::vector<GeodesicCircle> sites = lattice_sites();
    sites[3].radius = 0.42;
    save_sites(dir.file("s.json"), sites);
    auto back = load_sites(dir.file("s.json"));
    REQUIRE(back.size() == sites.size());
    for (size_t i = 0; i < sites.size(); ++i) {
        DiskPoint a = hyperboloid_to_disk(back[i].center);
        DiskPoint b = hyperboloid_to_disk(sites[i].center);
        CHECK(a.u == doctest::Approx(b.u).epsilon(1e-15));
        CHECK(a.v == doctest::Approx(b.v).epsilon(1e-15));
        CHECK(back[i].radius == doctest::Approx(sites[i].radius));
    }
    CHECK_THROWS_AS(load_sites(dir.file("missing.json")), input_error);

    write_text(dir.file("broken.json"), "{\"sites\": [ not json");
    CHECK_THROWS_AS(load_sites(dir.file("broken.json")), input_error);
}

TEST_CASE("mesh and sidecar round trip") {
    TempDir dir;
    SyntheticSurface surf = make_surface(2, 120, 3);
    save_mesh(dir.file("m.off"), dir.file("m.metric.json"), surf.mesh, surf.positions);
    MeshData back = load_mesh(dir.file("m.off"), dir.file("m.metric.json"));
    CHECK(back.mesh.vertex_count == surf.mesh.vertex_count);
    CHECK(back.mesh.faces.size() == surf.mesh.faces.size());
    CHECK(back.mesh.genus == 2);
    CHECK(back.mesh.surface_vertex_count == surf.mesh.surface_vertex_count);
    for (const auto& [key, len] : surf.mesh.edge_lengths)
        CHECK(back.mesh.edge_lengths.at(key) == doctest::Approx(len).epsilon(1e-16));
}

TEST_CASE("convergence csv schema") {
    std::vector<IterationRecord> log(2);
    log[1].iter = 1;
    log[1].lambda = 0.5;
    log[1].residual_inf = 1e-3;
    std::string csv = convergence_csv(log);
    CHECK(csv.rfind("iter,lambda,residual_inf,residual_l2,energy,millis\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("diagram dump round trip and rendering") {
    std::vector<GeodesicCircle> sites = lattice_sites();
    DiagramPair pair = build_power_diagram(sites);
    DiagramBuild build = make_build(std::move(pair));

    std::vector<HPoint> centers;
    for (const GeodesicCircle& c : sites) centers.push_back(c.center);
    GeodesicPolygon domain = convex_hull(centers);
    std::vector<DiskPoint> outline;
    for (const HPoint& p : domain.verts) outline.push_back(hyperboloid_to_disk(p));

    DiagramDump dump = make_dump(build, "planar", outline);
    std::string json1 = dump_to_json(dump);
    DiagramDump back = dump_from_json(json1);
    std::string json2 = dump_to_json(back);
    CHECK(json1 == json2);  // byte-stable through a round trip

    std::string svg1 = render_svg(dump);
    std::string svg2 = render_svg(back);
    CHECK(svg1 == svg2);
    CHECK(svg1.find("<svg") == 0);

    SUBCASE("geodesics through the origin render as straight segments") {
        DiagramDump diameter;
        diameter.mode = "planar";
        diameter.outline = {{0.4, 0.2}, {-0.4, -0.2}};  // collinear with the origin
        std::string svg = render_svg(diameter);
        CHECK(svg.find(" L ") != std::string::npos);
        CHECK(svg.find(" A ") == std::string::npos);
    }

    SUBCASE("geodesic arcs are orthogonal to the unit circle") {
        // Any arc center c with radius R on a disk geodesic satisfies
        // |c|^2 = R^2 + 1.
        DiskPoint p{0.62, 0.65};  // radius ~0.9
        DiskPoint q{0.2, 0.86};
        double det = 2.0 * (p.u * q.v - p.v * q.u);
        REQUIRE(std::abs(det) > 1e-12);
        double rp = 1.0 + p.norm2(), rq = 1.0 + q.norm2();
        double cu = (rp * q.v - rq * p.v) / det;
        double cv = (rq * p.u - rp * q.u) / det;
        double r2 = std::pow(std::hypot(cu - p.u, cv - p.v), 2);
        CHECK(cu * cu + cv * cv - r2 == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(cu * cu + cv * cv > 1.0);  // center outside the disk
    }
}

TEST_CASE("61-site diagram matches the golden dump") {
    std::vector<GeodesicCircle> sites;
    for (const DiskPoint& p : hex_disk_sites(4, 0.8)) sites.push_back({disk_to_hyperboloid(p), 0.0});
    std::vector<HPoint> centers;
    for (const GeodesicCircle& c : sites) centers.push_back(c.center);
    GeodesicPolygon domain = convex_hull(centers);
    DiagramBuild build = make_build(build_power_diagram(sites, domain));

    REQUIRE(build.diagram.cells.size() == 61);
    for (const PowerCell& c : build.diagram.cells) CHECK(!c.degenerate);

    std::vector<DiskPoint> outline;
    for (const HPoint& p : domain.verts) outline.push_back(hyperboloid_to_disk(p));
    std::string fresh = dump_to_json(make_dump(build, "planar", outline));
    std::string golden = read_text(std::string(HYPEROT_TEST_DIR) + "/golden/diagram61.json");
    CHECK(fresh == golden);
}

TEST_CASE("cli subcommands") {
    TempDir dir;
    std::vector<GeodesicCircle> sites = lattice_sites();
    save_sites(dir.file("sites.json"), sites);

    SUBCASE("hpd writes a dump and an svg") {
        int rc = run_cli({"hpd", "--sites", dir.file("sites.json"), "--out-dir",
                          dir.file("out_hpd")});
        CHECK(rc == 0);
        CHECK(fs::exists(dir.file("out_hpd") + "/diagram.json"));
        CHECK(fs::exists(dir.file("out_hpd") + "/diagram.svg"));

        // Determinism across runs.
        int rc2 = run_cli({"hpd", "--sites", dir.file("sites.json"), "--out-dir",
                           dir.file("out_hpd2")});
        CHECK(rc2 == 0);
        CHECK(read_text(dir.file("out_hpd") + "/diagram.json") ==
              read_text(dir.file("out_hpd2") + "/diagram.json"));
        CHECK(read_text(dir.file("out_hpd") + "/diagram.svg") ==
              read_text(dir.file("out_hpd2") + "/diagram.svg"));
    }

    SUBCASE("solve produces map, csv and svg pair") {
        int rc = run_cli({"solve", "--sites", dir.file("sites.json"), "--target-mode",
                          "euclidean-face-area", "--out-dir", dir.file("out_solve")});
        CHECK(rc == 0);
        CHECK(fs::exists(dir.file("out_solve") + "/map.json"));
        CHECK(fs::exists(dir.file("out_solve") + "/before.svg"));
        CHECK(fs::exists(dir.file("out_solve") + "/after.svg"));
        std::string csv = read_text(dir.file("out_solve") + "/convergence.csv");
        CHECK(csv.rfind("iter,lambda,residual_inf,residual_l2,energy,millis\n", 0) == 0);
    }

    SUBCASE("render reproduces the svg from the dump") {
        REQUIRE(run_cli({"hpd", "--sites", dir.file("sites.json"), "--out-dir",
                         dir.file("out_r")}) == 0);
        int rc = run_cli({"render", "--dump", dir.file("out_r") + "/diagram.json", "--out",
                          dir.file("re.svg")});
        CHECK(rc == 0);
        CHECK(read_text(dir.file("re.svg")) == read_text(dir.file("out_r") + "/diagram.svg"));
    }

    SUBCASE("malformed input exits 2") {
        write_text(dir.file("bad.json"), "{oops");
        CHECK(run_cli({"hpd", "--sites", dir.file("bad.json"), "--out-dir",
                       dir.file("out_bad")}) == 2);
        CHECK(run_cli({"solve", "--sites", dir.file("missing.json")}) == 2);
    }

    SUBCASE("geometry failure exits 3") {
        // Collinear sites have no two-dimensional domain.
        std::vector<GeodesicCircle> line;
        for (int i = 0; i < 5; ++i)
            line.push_back({disk_to_hyperboloid({0.1 * i - 0.2, 0.0}), 0.0});
        save_sites(dir.file("line.json"), line);
        CHECK(run_cli({"hpd", "--sites", dir.file("line.json"), "--out-dir",
                       dir.file("out_line")}) == 3);
    }

    SUBCASE("nonconvergence exits 4 and still writes the csv") {
        int rc = run_cli({"solve", "--sites", dir.file("sites.json"), "--target-mode",
                          "euclidean-face-area", "--max-iters", "1", "--eps", "1e-14",
                          "--out-dir", dir.file("out_nc")});
        CHECK(rc == 4);
        CHECK(fs::exists(dir.file("out_nc") + "/convergence.csv"));
    }

    SUBCASE("parametrize runs the surface pipeline") {
        SyntheticSurface surf = make_surface(2, 130, 3);
        save_mesh(dir.file("m.off"), dir.file("m.metric.json"), surf.mesh, surf.positions);
        int rc = run_cli({"parametrize", "--mesh", dir.file("m.off"), "--metric",
                          dir.file("m.metric.json"), "--target-mode", "hyperbolic-face-area",
                          "--out-dir", dir.file("out_par")});
        CHECK(rc == 0);
        CHECK(fs::exists(dir.file("out_par") + "/parametrization.json"));
        CHECK(fs::exists(dir.file("out_par") + "/domain.svg"));
        CHECK(fs::exists(dir.file("out_par") + "/cover.svg"));
        std::string csv = read_text(dir.file("out_par") + "/convergence.csv");
        CHECK(csv.rfind("iter,lambda,residual_inf,residual_l2,energy,millis\n", 0) == 0);

        SUBCASE("missing sidecar exits 2") {
            CHECK(run_cli({"parametrize", "--mesh", dir.file("m.off"), "--metric",
                           dir.file("nope.json"), "--out-dir", dir.file("out_x")}) == 2);
        }
    }
}
