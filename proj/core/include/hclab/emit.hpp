#pragma once

#include "hclab/sets.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hc {

/// Writes bytes through a ".partial" temp file and renames into place, so
/// interrupted runs never leave un-suffixed partial files.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

/// Doubles formatted with up-to-17 significant digits (round-trip exact,
/// byte-stable across runs).
std::string format_double(double v);

/// One lambda-gridpoint row of the grid table.
struct GridRow {
    double lambda = 0.0;
    std::vector<double> beta_entries;  // row-major
    double beta_max = 0.0;
    double beta_inf = 0.0;
    int band_count = 0;
    bool pole = false;
};

/// CSV with a schema tag header line.
std::string grid_table_csv(const std::vector<GridRow>& rows, int block);

/// JSON interval-list document for a family of sets.
std::string sets_json(const std::vector<SpectralSet>& sets);

/// JSON document for an elasticity tensor (flat component array in
/// row-major abmn order).
std::string tensor_json(const ElasticityTensor& t);

/// SVG band diagram: one lane per set, lambda on the x-axis; gaps white,
/// strong bands solid, weak bands hatched with the propagating-mode count
/// labeled; isolated points drawn as ticks.
std::string band_diagram_svg(const std::vector<SpectralSet>& sets, double lambda_max, int d);

}  // namespace hc
