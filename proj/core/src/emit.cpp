#include "hclab/emit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hc {

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const std::filesystem::path tmp = path.string() + ".partial";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!os) throw std::runtime_error("atomic_write: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string grid_table_csv(const std::vector<GridRow>& rows, int block) {
    std::ostringstream os;
    os << "# hclab-grid-table v1\n";
    os << "lambda";
    for (int i = 0; i < block; ++i)
        for (int j = 0; j < block; ++j) os << ",beta_" << i + 1 << j + 1;
    os << ",beta_max,beta_inf,band_count,pole\n";
    for (const auto& r : rows) {
        os << format_double(r.lambda);
        for (double v : r.beta_entries) os << "," << format_double(v);
        os << "," << format_double(r.beta_max) << "," << format_double(r.beta_inf) << ","
           << r.band_count << "," << (r.pole ? 1 : 0) << "\n";
    }
    return os.str();
}

namespace {

void append_set(std::ostringstream& os, const SpectralSet& set) {
    os << "    {\n      \"label\": \"" << set.label << "\",\n      \"intervals\": [";
    for (std::size_t i = 0; i < set.intervals.size(); ++i) {
        if (i) os << ", ";
        os << "[" << format_double(set.intervals[i].first) << ", "
           << format_double(set.intervals[i].second) << "]";
    }
    os << "],\n      \"points\": [";
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        if (i) os << ", ";
        os << format_double(set.points[i]);
    }
    os << "]\n    }";
}

}  // namespace

std::string sets_json(const std::vector<SpectralSet>& sets) {
    std::ostringstream os;
    os << "{\n  \"schema\": \"hclab-sets v1\",\n  \"sets\": [\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        append_set(os, sets[i]);
        if (i + 1 < sets.size()) os << ",";
        os << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string tensor_json(const ElasticityTensor& t) {
    std::ostringstream os;
    os << "{\n  \"schema\": \"hclab-tensor v1\",\n  \"dim\": " << t.dim()
       << ",\n  \"index_order\": \"abmn-row-major\",\n  \"components\": [";
    const auto& c = t.components();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ", ";
        os << format_double(c[i]);
    }
    os << "]\n}\n";
    return os.str();
}

std::string band_diagram_svg(const std::vector<SpectralSet>& sets, double lambda_max, int d) {
    const int width = 900, lane_h = 56, margin = 60, top = 40;
    const int height = top + lane_h * static_cast<int>(sets.size()) + 40;
    auto xmap = [&](double lam) {
        return margin + (width - 2 * margin) * (lam / lambda_max);
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\">\n";
    os << "  <defs>\n"
          "    <pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" "
          "patternTransform=\"rotate(45)\">\n"
          "      <rect width=\"6\" height=\"6\" fill=\"#9ecae1\"/>\n"
          "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#08519c\" stroke-width=\"2\"/>\n"
          "    </pattern>\n"
          "  </defs>\n";
    os << "  <line x1=\"" << margin << "\" y1=\"" << height - 28 << "\" x2=\"" << width - margin
       << "\" y2=\"" << height - 28 << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 10; ++tick) {
        const double lam = lambda_max * tick / 10.0;
        os << "  <text x=\"" << xmap(lam) << "\" y=\"" << height - 10
           << "\" font-size=\"11\" text-anchor=\"middle\">" << format_double(lam) << "</text>\n";
    }
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const int y0 = top + static_cast<int>(s) * lane_h;
        os << "  <text x=\"8\" y=\"" << y0 + lane_h / 2 << "\" font-size=\"13\">" << sets[s].label
           << "</text>\n";
        // Interval rectangles: classify by the annotation when present.
        for (const auto& [a, b] : sets[s].intervals) {
            bool weak = false;
            int label_count = -1;
            for (std::size_t g = 0; g < sets[s].grid.size(); ++g) {
                const double lam = sets[s].grid[g];
                if (lam <= a || lam >= b) continue;
                const int c = sets[s].band_count[g];
                if (c >= 1 && c < d) {
                    weak = true;
                    label_count = c;
                }
            }
            os << "  <rect x=\"" << xmap(a) << "\" y=\"" << y0 + 8 << "\" width=\""
               << std::max(1.5, xmap(b) - xmap(a)) << "\" height=\"" << lane_h - 20 << "\" fill=\""
               << (weak ? "url(#hatch)" : "#3182bd") << "\"/>\n";
            if (weak)
                os << "  <text x=\"" << 0.5 * (xmap(a) + xmap(b)) << "\" y=\"" << y0 + 4
                   << "\" font-size=\"10\" text-anchor=\"middle\">modes=" << label_count
                   << "</text>\n";
        }
        for (double p : sets[s].points)
            os << "  <line x1=\"" << xmap(p) << "\" y1=\"" << y0 + 4 << "\" x2=\"" << xmap(p)
               << "\" y2=\"" << y0 + lane_h - 8 << "\" stroke=\"#e6550d\" stroke-width=\"2\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace hc
