#include "hclab/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hclab: limiting spectra of high-contrast random elastic composites"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir;
    std::string cache_dir;
    bool no_cache = false;
    double lambda_max = -1.0, h = -1.0, h_cell = -1.0, lambda0 = std::nan("");
    int grid_points = -1, cells = -1, samples = -1, count = -1, threads = -1, n_cells = -1;
    long long seed = -1;

    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "RNG seed (overrides config)");
    app.add_option("--threads", threads, "worker threads");
    app.add_flag("--no-cache", no_cache, "disable the eigenpair cache");
    app.add_option("--lambda-max", lambda_max, "upper end of the lambda grid");
    app.add_option("--grid-points", grid_points, "lambda grid size");
    app.add_option("--h", h, "target mesh size");
    app.add_option("--h-cell", h_cell, "per-cell mesh size for torus runs");
    app.add_option("--cells", cells, "beta-infinity sub-cube side (cells)");
    app.add_option("--n-cells", n_cells, "torus cells per side");
    app.add_option("--samples", samples, "Monte Carlo sample count");
    app.add_option("--count", count, "eigenvalue count");
    app.add_option("--lambda0", lambda0, "target spectral parameter");
    app.add_option("--cache-dir", cache_dir, "eigenpair cache directory (or HCLAB_CACHE_DIR)");

    std::string command;
    for (const char* name : {"eigs", "beta", "beta-inf", "spectrum", "bands", "chom", "validate",
                             "quasimode"}) {
        CLI::App* sub = app.add_subcommand(name, "");
        sub->callback([&command, name] { command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        hc::RunConfig cfg = hc::parse_run_config(slurp(config_path));
        if (!command.empty()) cfg.command = command;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (threads > 0) cfg.threads = threads;
        if (no_cache) cfg.use_cache = false;
        if (lambda_max > 0) cfg.lambda_max = lambda_max;
        if (grid_points > 0) cfg.grid_points = grid_points;
        if (h > 0) cfg.h = h;
        if (h_cell > 0) cfg.h_cell = h_cell;
        if (cells > 0) cfg.window_cells = cells;
        if (n_cells > 0) cfg.n_cells = n_cells;
        if (samples >= 0) cfg.samples = samples;
        if (count > 0) cfg.count = count;
        if (!std::isnan(lambda0)) cfg.lambda0 = lambda0;

        const hc::RunManifest manifest = hc::run(cfg);
        std::cout << "wrote " << manifest.files.size() << " files to " << cfg.out_dir << " ("
                  << manifest.wall_clock_seconds << " s)\n";
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "{\"error\": \"usage\", \"message\": \"" << e.what() << "\"}\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": \"runtime\", \"message\": \"" << e.what() << "\"}\n";
        return 1;
    }
}
