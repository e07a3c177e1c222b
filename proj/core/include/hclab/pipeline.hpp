#pragma once

#include "hclab/beta.hpp"
#include "hclab/emit.hpp"

#include <string>
#include <vector>

namespace hc {

/// Fully resolved run configuration: one command, one model, numeric
/// parameters within documented ranges.
struct RunConfig {
    std::string command;  // eigs|beta|beta-inf|spectrum|bands|chom|validate|quasimode
    InclusionModel model;
    PhysicsSpec physics;
    ElasticityTensor c1 = make_isotropic({1.0, 1.0}, 2);

    double h = 1.0 / 32;
    double lambda_max = 10.0;
    int grid_points = 400;
    int window_cells = 8;   // --cells
    int samples = 64;       // --samples
    int n_cells = 8;
    double h_cell = 1.0 / 16;
    int count = 12;
    double lambda0 = 1.0;
    double envelope_width = 0.5;
    std::uint64_t seed = 0;
    int threads = 1;
    bool use_cache = true;
    std::string out_dir = "out";
    std::string cache_dir;  // empty = default resolution

    void validate() const;  // throws std::invalid_argument on bad input
};

/// Parses the structured-text (JSON) config document.
RunConfig parse_run_config(const std::string& json_text);
/// Serializes the resolved config back out (the manifest echo).
std::string run_config_json(const RunConfig& config);

struct RunManifest {
    std::string command;
    std::string config_echo;
    std::string version;
    std::string config_hash;
    double wall_clock_seconds = 0.0;
    std::vector<std::string> files;  // every produced file, manifest last
};

/// Executes the configured pipeline: computes, writes outputs atomically
/// into out_dir, writes manifest.json last. Returns the manifest.
RunManifest run(const RunConfig& config);

/// The lambda-grid table shared by the beta/spectrum pipelines.
std::vector<GridRow> compute_grid_rows(const BetaEvaluator& eval, const GridOptions& grid,
                                       bool with_beta_inf, const BetaInfinityOptions& binf,
                                       int threads);

}  // namespace hc
