#include "hclab/pipeline.hpp"

#include "hclab/cache.hpp"
#include "hclab/confront.hpp"
#include "hclab/dispersion.hpp"
#include "hclab/parallel.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hc {

namespace {

using nlohmann::json;

InclusionShape parse_shape(const json& j) {
    const std::string type = j.value("type", "rectangle");
    if (type == "rectangle") return rectangle_shape(j.value("l1", 0.4), j.value("l2", 0.2));
    if (type == "square") return square_shape(j.value("side", 0.3));
    if (type == "disk") return disk_shape(j.value("r", 0.2), j.value("segments", 64));
    if (type == "polygon") {
        Polygon p;
        for (const auto& v : j.at("vertices")) p.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        return make_shape(j.value("id", "poly"), std::move(p));
    }
    throw std::invalid_argument("config: unknown shape type '" + type + "'");
}

ElasticityTensor parse_tensor(const json& j) {
    if (j.contains("components")) {
        std::vector<double> c = j.at("components").get<std::vector<double>>();
        return ElasticityTensor::from_components(j.value("dim", 2), c);
    }
    return make_isotropic({j.value("c1", 0.0), j.value("c2", 1.0)}, j.value("dim", 2));
}

InclusionModel parse_model(const json& j) {
    InclusionModel m;
    const std::string kind = j.value("kind", "periodic-single");
    if (kind == "periodic-single") m.kind = ModelKind::periodic_single;
    else if (kind == "periodic-triple-rotation") m.kind = ModelKind::periodic_triple_rotation;
    else if (kind == "iid-rotation") m.kind = ModelKind::iid_rotation;
    else if (kind == "iid-scaling") m.kind = ModelKind::iid_scaling;
    else throw std::invalid_argument("config: unknown model kind '" + kind + "'");
    m.base_shape = parse_shape(j.at("shape"));
    if (j.contains("probabilities")) m.probabilities = j.at("probabilities").get<std::vector<double>>();
    if (j.contains("scaling")) {
        const json& s = j.at("scaling");
        if (s.contains("atoms")) {
            for (const auto& a : s.at("atoms"))
                m.scaling.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        } else {
            m.scaling.continuous = true;
            m.scaling.r1 = s.value("r1", 0.3);
            m.scaling.r2 = s.value("r2", 0.6);
        }
    }
    return m;
}

}  // namespace

void RunConfig::validate() const {
    static const char* commands[] = {"eigs", "beta",     "beta-inf", "spectrum",
                                     "bands", "chom",    "validate", "quasimode"};
    bool ok = false;
    for (const char* c : commands) ok = ok || command == c;
    if (!ok) throw std::invalid_argument("config: unknown command '" + command + "'");
    if (h <= 0.0 || h > 0.5) throw std::invalid_argument("config: h out of (0, 0.5]");
    if (lambda_max <= 0.0) throw std::invalid_argument("config: lambda-max must be positive");
    if (grid_points < 2) throw std::invalid_argument("config: grid-points >= 2");
    if (count < 1) throw std::invalid_argument("config: count >= 1");
    if (window_cells < 1) throw std::invalid_argument("config: cells >= 1");
    if (command == "beta-inf" && samples < 1)
        throw std::invalid_argument("config: beta-inf requires samples >= 1");
    if (samples < 0) throw std::invalid_argument("config: samples >= 0");
    if (n_cells < 1) throw std::invalid_argument("config: n_cells >= 1");
    if (h_cell <= 0.0 || h_cell > 0.5) throw std::invalid_argument("config: h_cell out of (0, 0.5]");
    if (threads < 1) throw std::invalid_argument("config: threads >= 1");
    model.validate();
}

RunConfig parse_run_config(const std::string& json_text) {
    const json j = json::parse(json_text);
    RunConfig cfg;
    cfg.command = j.value("command", "");
    cfg.model = parse_model(j.at("model"));
    if (j.contains("physics")) {
        const json& p = j.at("physics");
        cfg.physics.scalar = p.value("kind", "elasticity") == "scalar";
        cfg.physics.scalar_coefficient = p.value("scalar_coefficient", 1.0);
        if (p.contains("c0")) cfg.physics.c0 = parse_tensor(p.at("c0"));
    }
    if (j.contains("c1")) cfg.c1 = parse_tensor(j.at("c1"));
    cfg.h = j.value("h", cfg.h);
    cfg.lambda_max = j.value("lambda_max", cfg.lambda_max);
    cfg.grid_points = j.value("grid_points", cfg.grid_points);
    cfg.window_cells = j.value("cells", cfg.window_cells);
    cfg.samples = j.value("samples", cfg.samples);
    cfg.n_cells = j.value("n_cells", cfg.n_cells);
    cfg.h_cell = j.value("h_cell", cfg.h_cell);
    cfg.count = j.value("count", cfg.count);
    cfg.lambda0 = j.value("lambda0", cfg.lambda0);
    cfg.envelope_width = j.value("envelope_width", cfg.envelope_width);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.use_cache = j.value("cache", cfg.use_cache);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    return cfg;
}

std::string run_config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    json m;
    switch (c.model.kind) {
        case ModelKind::periodic_single: m["kind"] = "periodic-single"; break;
        case ModelKind::periodic_triple_rotation: m["kind"] = "periodic-triple-rotation"; break;
        case ModelKind::iid_rotation: m["kind"] = "iid-rotation"; break;
        case ModelKind::iid_scaling: m["kind"] = "iid-scaling"; break;
    }
    json shp;
    shp["type"] = "polygon";
    shp["id"] = c.model.base_shape.id;
    json verts = json::array();
    for (const auto& v : c.model.base_shape.boundary) verts.push_back({v.x(), v.y()});
    shp["vertices"] = verts;
    m["shape"] = shp;
    if (!c.model.probabilities.empty()) m["probabilities"] = c.model.probabilities;
    if (c.model.kind == ModelKind::iid_scaling) {
        json s;
        if (c.model.scaling.continuous) {
            s["r1"] = c.model.scaling.r1;
            s["r2"] = c.model.scaling.r2;
        } else {
            json atoms = json::array();
            for (auto [r, w] : c.model.scaling.atoms) atoms.push_back({r, w});
            s["atoms"] = atoms;
        }
        m["scaling"] = s;
    }
    j["model"] = m;
    j["physics"] = {{"kind", c.physics.scalar ? "scalar" : "elasticity"},
                    {"scalar_coefficient", c.physics.scalar_coefficient},
                    {"c0", {{"dim", 2}, {"components", c.physics.c0.components()}}}};
    j["c1"] = {{"dim", 2}, {"components", c.c1.components()}};
    j["h"] = c.h;
    j["lambda_max"] = c.lambda_max;
    j["grid_points"] = c.grid_points;
    j["cells"] = c.window_cells;
    j["samples"] = c.samples;
    j["n_cells"] = c.n_cells;
    j["h_cell"] = c.h_cell;
    j["count"] = c.count;
    j["lambda0"] = c.lambda0;
    j["envelope_width"] = c.envelope_width;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["cache"] = c.use_cache;
    j["out"] = c.out_dir;
    return j.dump(2) + "\n";
}

std::vector<GridRow> compute_grid_rows(const BetaEvaluator& eval, const GridOptions& grid,
                                       bool with_beta_inf, const BetaInfinityOptions& binf,
                                       int threads) {
    const std::vector<double> lams = make_lambda_grid(eval, grid);
    std::vector<GridRow> rows(lams.size());
    BetaInfinityOptions closed = binf;
    closed.samples = 0;  // closed form only on the grid
    parallel_for(static_cast<int>(lams.size()), threads, [&](int i) {
        GridRow& r = rows[i];
        r.lambda = lams[i];
        const BetaMatrix b = eval.beta(lams[i]);
        r.pole = b.pole_flag;
        const int d = eval.physics().block();
        r.beta_entries.assign(b.value.data(), b.value.data() + d * d);
        if (!b.pole_flag) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.value);
            r.beta_max = es.eigenvalues().maxCoeff();
            int count = 0;
            for (int k = 0; k < es.eigenvalues().size(); ++k)
                if (es.eigenvalues()[k] >= 0.0) ++count;
            r.band_count = count;
            if (with_beta_inf) r.beta_inf = beta_infinity(eval, lams[i], closed).closed_form;
        } else {
            r.band_count = -1;
            r.beta_max = std::numeric_limits<double>::quiet_NaN();
            r.beta_inf = std::numeric_limits<double>::quiet_NaN();
        }
        if (!with_beta_inf && !r.pole) r.beta_inf = std::numeric_limits<double>::quiet_NaN();
    });
    return rows;
}

namespace {

struct OutputCollector {
    std::filesystem::path dir;
    std::vector<std::string> files;

    void write(const std::string& name, const std::string& bytes) {
        atomic_write(dir / name, bytes);
        files.push_back(name);
    }
};

std::string eigs_csv(const EigenDecomposition& dec) {
    std::ostringstream os;
    os << "# hclab-eigs v1\n";
    os << "n,nu";
    for (int c = 0; c < dec.moments.cols(); ++c) os << ",m" << c + 1;
    os << "\n";
    for (int i = 0; i < dec.values.size(); ++i) {
        os << i + 1 << "," << format_double(dec.values[i]);
        for (int c = 0; c < dec.moments.cols(); ++c) os << "," << format_double(dec.moments(i, c));
        os << "\n";
    }
    return os.str();
}

}  // namespace

RunManifest run(const RunConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    EigenCache::instance().set_enabled(config.use_cache);
    if (!config.cache_dir.empty()) EigenCache::instance().set_directory(config.cache_dir);

    OutputCollector out;
    out.dir = config.out_dir;

    BetaOptions bopt;
    bopt.h = config.h;
    bopt.use_cache = config.use_cache;
    GridOptions grid;
    grid.lambda_max = config.lambda_max;
    grid.points = config.grid_points;
    BetaInfinityOptions binf;
    binf.window_cells = config.window_cells;
    binf.samples = config.samples;
    binf.seed = config.seed + 1;

    if (config.command == "eigs") {
        SpectrumOptions sopt;
        sopt.h = config.h;
        sopt.count = config.count;
        sopt.scalar = config.physics.scalar;
        sopt.scalar_coefficient = config.physics.scalar_coefficient;
        sopt.use_cache = config.use_cache;
        const EigenDecomposition dec =
            dirichlet_spectrum(config.model.base_shape, config.physics.c0, sopt);
        out.write("eigs.csv", eigs_csv(dec));
    } else if (config.command == "beta") {
        BetaEvaluator eval(config.model, config.physics, bopt);
        const auto rows = compute_grid_rows(eval, grid, false, binf, config.threads);
        out.write("beta_grid.csv", grid_table_csv(rows, eval.physics().block()));
    } else if (config.command == "beta-inf") {
        BetaEvaluator eval(config.model, config.physics, bopt);
        std::ostringstream os;
        os << "# hclab-beta-inf v1\nlambda,estimate,closed_form\n";
        const auto lams = make_lambda_grid(eval, grid);
        const double guard = eval.pole_guard();
        for (double lam : lams) {
            if (eval.pole_distance(lam) <= guard) continue;
            const BetaInfinityResult r = beta_infinity(eval, lam, binf);
            os << format_double(lam) << "," << format_double(r.estimate) << ","
               << format_double(r.closed_form) << "\n";
        }
        out.write("beta_inf.csv", os.str());
    } else if (config.command == "spectrum" || config.command == "bands") {
        BetaEvaluator eval(config.model, config.physics, bopt);
        const SpectralSet micro = sigma_A0(eval, config.lambda_max);
        const SpectralSet hom = spectrum_hom(eval, grid);
        const SpectralSet g = set_G(eval, grid, binf);
        const std::string svg =
            band_diagram_svg({micro, hom, g}, config.lambda_max, eval.physics().block());
        if (config.command == "spectrum") {
            const auto rows = compute_grid_rows(eval, grid, true, binf, config.threads);
            out.write("grid.csv", grid_table_csv(rows, eval.physics().block()));
            out.write("sets.json", sets_json({micro, hom, g}));
        }
        out.write("bands.svg", svg);
    } else if (config.command == "chom") {
        const RveResult rve =
            chom_rve(config.model, config.c1, config.n_cells, config.samples, config.h, config.seed + 1);
        out.write("chom.json", tensor_json(rve.mean));
        std::ostringstream os;
        os << "# hclab-chom-samples v1\nsample";
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << ",C" << i + 1 << j + 1;
        os << "\n";
        for (std::size_t s = 0; s < rve.samples.size(); ++s) {
            os << s;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) os << "," << format_double(rve.samples[s](i, j));
            os << "\n";
        }
        out.write("chom_samples.csv", os.str());
    } else if (config.command == "validate") {
        BetaEvaluator eval(config.model, config.physics, bopt);
        const SpectralSet g = set_G(eval, grid, binf);
        EpsilonSpectrumOptions eopt;
        eopt.n_cells = config.n_cells;
        eopt.h_cell = config.h_cell;
        eopt.count = config.count;
        eopt.seed = config.seed;
        const EpsilonSpectrumReport rep =
            epsilon_spectrum(config.model, config.physics.c0, config.c1, eopt, &g);
        json j;
        j["schema"] = "hclab-validate v1";
        j["epsilon"] = rep.epsilon;
        j["h_cell"] = rep.h_cell;
        j["eigenvalues"] = std::vector<double>(rep.eigenvalues.data(),
                                               rep.eigenvalues.data() + rep.eigenvalues.size());
        j["distances"] = rep.distances;
        j["gap_violations"] = rep.gap_violations;
        out.write("validate.json", j.dump(2) + "\n");
        std::ostringstream os;
        os << "# hclab-epsilon-eigs v1\nn,lambda,distance\n";
        for (int i = 0; i < rep.eigenvalues.size(); ++i)
            os << i + 1 << "," << format_double(rep.eigenvalues[i]) << ","
               << format_double(rep.distances.empty() ? 0.0 : rep.distances[i]) << "\n";
        out.write("epsilon_eigs.csv", os.str());
        // Distance-vs-mode sketch.
        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"240\">\n";
        for (int i = 0; i < rep.eigenvalues.size(); ++i) {
            const double d = rep.distances.empty() ? 0.0 : rep.distances[i];
            svg << "  <rect x=\"" << 20 + i * 22 << "\" y=\"" << 200 - 1500 * d
                << "\" width=\"16\" height=\"" << std::max(1.0, 1500 * d) << "\" fill=\"#3182bd\"/>\n";
        }
        svg << "</svg>\n";
        out.write("distances.svg", svg.str());
    } else if (config.command == "quasimode") {
        QuasimodeOptions qopt;
        qopt.n_cells = config.n_cells;
        qopt.h_cell = config.h_cell;
        qopt.envelope_width = config.envelope_width;
        qopt.seed = config.seed;
        const QuasimodeReport rep = quasimode_residual(config.model, config.physics.c0, config.c1,
                                                       config.lambda0, qopt);
        json j;
        j["schema"] = "hclab-quasimode v1";
        j["lambda0"] = rep.lambda0;
        j["epsilon"] = rep.epsilon;
        j["envelope_width"] = rep.envelope_width;
        j["wavenumber"] = rep.wavenumber;
        j["residual_ratio"] = rep.residual_ratio;
        j["residual_ratio_uncorrected"] = rep.residual_ratio_uncorrected;
        out.write("quasimode.json", j.dump(2) + "\n");
    }

    RunManifest manifest;
    manifest.command = config.command;
    manifest.config_echo = run_config_json(config);
    manifest.version = "hclab 0.1.0";
    manifest.config_hash = fnv1a_hex(manifest.config_echo);
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json mj;
    mj["schema"] = "hclab-manifest v1";
    mj["command"] = manifest.command;
    mj["version"] = manifest.version;
    mj["config"] = json::parse(manifest.config_echo);
    mj["config_hash"] = manifest.config_hash;
    mj["wall_clock_seconds"] = manifest.wall_clock_seconds;
    manifest.files = out.files;
    mj["files"] = out.files;
    atomic_write(out.dir / "manifest.json", mj.dump(2) + "\n");
    manifest.files.push_back("manifest.json");
    return manifest;
}

}  // namespace hc
