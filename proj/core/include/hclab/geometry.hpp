#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hc {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;  // simple, positively oriented (CCW)

double polygon_area(const Polygon& p);
Vec2 polygon_centroid(const Polygon& p);
double polygon_diameter(const Polygon& p);
bool polygon_is_simple(const Polygon& p);
bool point_in_polygon(const Vec2& x, const Polygon& p);
bool polygons_overlap(const Polygon& a, const Polygon& b);
double polygon_distance(const Polygon& a, const Polygon& b);

/// A single inclusion shape in reference coordinates (centroid at the
/// origin). The shift vector D (per-coordinate infimum) and the diam < 1/2
/// rule are checked by validate_assumptions, not at construction: test
/// fixtures are allowed to build out-of-spec shapes on purpose.
struct InclusionShape {
    std::string id;
    Polygon boundary;

    double diameter() const { return polygon_diameter(boundary); }
    double area() const { return polygon_area(boundary); }
    /// Per-coordinate infimum of the vertex set.
    Vec2 shift_vector() const;
};

/// Throws std::invalid_argument unless `boundary` is a simple CCW polygon.
InclusionShape make_shape(const std::string& id, Polygon boundary);

/// Canonical shape constructors (centered at the origin).
InclusionShape rectangle_shape(double l1, double l2, const std::string& id = "rect");
InclusionShape square_shape(double side, const std::string& id = "square");
InclusionShape disk_shape(double radius, int segments = 64, const std::string& id = "disk");

/// Isometries of the d=2 lattice cell: reflections across the coordinate
/// axes and the counterclockwise quarter rotation. All have exact (0, +-1)
/// matrix entries, so applying them to coordinates is exact in floating
/// point.
struct SymmetryOp {
    enum class Kind { reflect_x1, reflect_x2, rotate_quarter };
    Kind kind = Kind::rotate_quarter;
    int power = 1;  // for rotations: apply `power` quarter turns

    Eigen::Matrix2d matrix() const;
    bool is_reflection() const { return kind != Kind::rotate_quarter; }
};

InclusionShape apply_symmetry(const InclusionShape& shape, const SymmetryOp& op);

enum class ModelKind {
    periodic_single,
    periodic_triple_rotation,  // deterministic checkerboard of quarter-rotations
    iid_rotation,
    iid_scaling,
};

struct ScalingLaw {
    bool continuous = false;
    double r1 = 1.0, r2 = 1.0;                  // uniform on [r1, r2] when continuous
    std::vector<std::pair<double, double>> atoms;  // (r, weight) otherwise
};

/// Distribution of a single lattice cell's content: one base shape placed at
/// the cell center, transformed by a random rotation and/or scale.
/// Lattice models only; cell size is 1.
struct InclusionModel {
    ModelKind kind = ModelKind::periodic_single;
    InclusionShape base_shape;
    std::vector<double> probabilities;  // rotation weights for iid_rotation (quarter turns 0..3)
    ScalingLaw scaling;

    void validate() const;  // throws on invalid weights / scaling range
    /// Expected inclusion area per unit cell.
    double expected_volume_fraction() const;
};

struct Placement {
    int cell_x = 0, cell_y = 0;
    int rotation = 0;     // quarter turns, 0..3
    bool reflected = false;
    double scale = 1.0;

    /// Vertices of the placed inclusion in window coordinates
    /// (cell [cx, cx+1] x [cy, cy+1], shape centered at the cell center).
    Polygon transformed(const InclusionShape& shape) const;
};

/// A sampled finite window of the random set of inclusions: an L x L block
/// of unit cells, at most one inclusion per cell.
struct Configuration {
    int window_side = 0;
    std::vector<Placement> placements;
    std::uint64_t seed = 0;
    InclusionShape shape;  // shared base shape (reference coordinates)
};

/// Deterministic for fixed (model, L, seed); per-cell draws are independent
/// for the iid kinds. Throws if a transformed shape cannot fit inside its
/// cell with the 0.05 containment margin.
Configuration generate_configuration(const InclusionModel& model, int window_side,
                                     std::uint64_t seed);

struct InclusionCheck {
    std::size_t index = 0;
    bool diameter_ok = false;
    bool containment_ok = false;
    double diameter = 0.0;
    double margin = 0.0;  // distance from the inclusion to its cell boundary
};

struct ValidationReport {
    bool pass = false;
    std::vector<InclusionCheck> inclusions;
    std::vector<std::pair<std::size_t, std::size_t>> overlaps;
    double min_separation = 0.0;
};

/// Checks the geometric assumptions: per-inclusion diameter < 1/2,
/// containment in the closed cell with the 0.05 margin, and pairwise
/// disjointness of closures (with the minimum separation distance).
ValidationReport validate_assumptions(const Configuration& cfg);

/// Averages of the inclusion indicator over all aligned sub-blocks of
/// `sub_side` x `sub_side` cells (stride one cell).
std::vector<double> volume_fraction_average(const Configuration& cfg, int sub_side);

/// Deterministic per-cell random stream (splitmix64 over a cell key).
std::uint64_t cell_key(std::uint64_t seed, int cx, int cy);
double uniform01(std::uint64_t& state);
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace hc
