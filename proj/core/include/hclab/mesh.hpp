#pragma once

#include "hclab/geometry.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace hc {

enum class EdgeTag { interior, dirichlet, periodic_master, periodic_slave, interface };

/// Conforming P1 triangle mesh. Material boundaries are resolved: every
/// constraint polyline of the input geometry appears as a chain of mesh
/// edges, so material areas are exact polygon areas.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;  // CCW triples
    std::vector<int> tri_material;              // 0 = matrix, 1 = inclusion
    std::vector<int> tri_inclusion;             // placement index or -1

    std::vector<bool> node_dirichlet;
    std::vector<int> node_master;  // periodic identification target, or -1

    struct TaggedEdge {
        int a = 0, b = 0;
        EdgeTag tag = EdgeTag::interior;
    };
    std::vector<TaggedEdge> boundary_edges;

    double h = 0.0;

    double triangle_area(std::size_t t) const;
    double material_area(int material) const;
    double min_angle() const;
    int count_nodes() const { return static_cast<int>(nodes.size()); }

    /// Scales all node coordinates in place (used to map a window-unit torus
    /// mesh onto the physical unit torus).
    void scale_nodes(double factor);
};

/// Dirichlet-boundary mesh of the interior of a single shape, meshed in the
/// shape's (centered) reference coordinates. Axis-aligned rectangles get a
/// symmetric structured criss-cross mesh; other polygons go through
/// constrained Delaunay over a protected background grid.
Mesh build_shape_mesh(const InclusionShape& shape, double h);

/// Periodic mesh of the window [0,L]^2 with the configuration's inclusions
/// removed (perforated matrix). Cell faces are tagged periodic; hole
/// boundaries are tagged `dirichlet` or `interface` per the flag.
Mesh build_perforated_mesh(const Configuration& cfg, double h, bool holes_dirichlet = false);

/// Fully periodic two-phase mesh of the window [0,L]^2 with both phases
/// present and material tags resolved.
Mesh build_two_phase_mesh(const Configuration& cfg, double h);

/// Plain-text serialization (node table, triangle table, tag tables).
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace hc
