// Fixture generator: the evenly spaced disk dataset and synthetic
// multi-genus metric meshes with their sidecars.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "hyperot/io.hpp"
#include "hyperot/synthetic.hpp"

using namespace hyperot;

int main(int argc, char** argv) {
    CLI::App app{"hyperot fixture generator"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    int rings = 4;
    double outer = 0.8;
    CLI::App* disk = app.add_subcommand("disk", "hexagonal disk lattice sites");
    disk->add_option("--rings", rings);
    disk->add_option("--outer-radius", outer);
    disk->add_option("--out-dir", out_dir);

    int genus = 2, vertices = 2200;
    uint64_t seed = 7;
    bool irregular = false;
    std::string name = "surface";
    CLI::App* surf = app.add_subcommand("surface", "synthetic genus-g metric mesh");
    surf->add_option("--genus", genus);
    surf->add_option("--vertices", vertices);
    surf->add_option("--seed", seed);
    surf->add_flag("--irregular", irregular);
    surf->add_option("--name", name);
    surf->add_option("--out-dir", out_dir);

    CLI11_PARSE(app, argc, argv);
    std::filesystem::create_directories(out_dir);
    auto path = [&](const std::string& f) {
        return (std::filesystem::path(out_dir) / f).string();
    };

    try {
        if (disk->parsed()) {
            std::vector<GeodesicCircle> sites;
            for (const DiskPoint& p : hex_disk_sites(rings, outer))
                sites.push_back({disk_to_hyperboloid(p), 0.0});
            save_sites(path("sites" + std::to_string(sites.size()) + ".json"), sites);
            std::cout << "wrote " << sites.size() << " sites\n";
        } else if (surf->parsed()) {
            SyntheticSurface s = make_surface(genus, vertices, seed, irregular);
            save_mesh(path(name + ".off"), path(name + ".metric.json"), s.mesh, s.positions);
            std::cout << "wrote " << name << ": " << s.mesh.surface_vertex_count
                      << " surface vertices, " << s.mesh.faces.size() << " faces\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
