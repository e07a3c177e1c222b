#include "hclab/mesh.hpp"

#include "hclab/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace hc {

double Mesh::triangle_area(std::size_t t) const {
    const Vec2& a = nodes[triangles[t][0]];
    const Vec2& b = nodes[triangles[t][1]];
    const Vec2& c = nodes[triangles[t][2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

double Mesh::material_area(int material) const {
    double s = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t)
        if (tri_material[t] == material) s += triangle_area(t);
    return s;
}

double Mesh::min_angle() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& tri : triangles) {
        for (int k = 0; k < 3; ++k) {
            const Vec2 u = nodes[tri[(k + 1) % 3]] - nodes[tri[k]];
            const Vec2 v = nodes[tri[(k + 2) % 3]] - nodes[tri[k]];
            const double ang = std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
            worst = std::min(worst, ang);
        }
    }
    return worst;
}

void Mesh::scale_nodes(double factor) {
    for (auto& n : nodes) n *= factor;
    h *= factor;
}

namespace {

constexpr double kAreaTol = 1e-14;

void check_not_degenerate(const Mesh& mesh) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double a = mesh.triangle_area(t);
        if (a <= kAreaTol)
            throw std::runtime_error("build_mesh: degenerate triangle (area " + std::to_string(a) +
                                     ") at index " + std::to_string(t));
    }
}

// Boundary edges = edges adjacent to exactly one triangle.
std::vector<std::pair<int, int>> free_edges(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            count[{a, b}]++;
        }
    std::vector<std::pair<int, int>> out;
    for (const auto& [e, c] : count)
        if (c == 1) out.push_back(e);
    return out;
}

bool is_axis_aligned_rectangle(const Polygon& p) {
    if (p.size() != 4) return false;
    for (int k = 0; k < 4; ++k) {
        const Vec2 d = p[(k + 1) % 4] - p[k];
        if (d.x() != 0.0 && d.y() != 0.0) return false;
    }
    return true;
}

Mesh criss_cross_rectangle(const Polygon& poly, double h) {
    double xmin = poly[0].x(), xmax = poly[0].x(), ymin = poly[0].y(), ymax = poly[0].y();
    for (const auto& v : poly) {
        xmin = std::min(xmin, v.x());
        xmax = std::max(xmax, v.x());
        ymin = std::min(ymin, v.y());
        ymax = std::max(ymax, v.y());
    }
    const double l1 = xmax - xmin, l2 = ymax - ymin;
    const int nx = std::max(1, static_cast<int>(std::llround(l1 / h)));
    const int ny = std::max(1, static_cast<int>(std::llround(l2 / h)));

    // Node coordinates (2i - n) * (l / 2n) relative to the center come in
    // exact +- pairs, so the discrete operator inherits the reflection and
    // quarter-rotation symmetries of the shape to the last bit.
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double dx2 = l1 / (2.0 * nx), dy2 = l2 / (2.0 * ny);

    Mesh mesh;
    mesh.h = std::max(l1 / nx, l2 / ny);
    auto corner_id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.nodes.emplace_back(cx + (2 * i - nx) * dx2, cy + (2 * j - ny) * dy2);
    const int center_base = static_cast<int>(mesh.nodes.size());
    auto center_id = [&](int i, int j) { return center_base + j * nx + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            mesh.nodes.emplace_back(cx + (2 * i + 1 - nx) * dx2, cy + (2 * j + 1 - ny) * dy2);

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int c00 = corner_id(i, j), c10 = corner_id(i + 1, j);
            const int c11 = corner_id(i + 1, j + 1), c01 = corner_id(i, j + 1);
            const int cc = center_id(i, j);
            mesh.triangles.push_back({c00, c10, cc});
            mesh.triangles.push_back({c10, c11, cc});
            mesh.triangles.push_back({c11, c01, cc});
            mesh.triangles.push_back({c01, c00, cc});
        }
    mesh.tri_material.assign(mesh.triangles.size(), 0);
    mesh.tri_inclusion.assign(mesh.triangles.size(), -1);
    mesh.node_master.assign(mesh.nodes.size(), -1);
    mesh.node_dirichlet.assign(mesh.nodes.size(), false);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            if (i == 0 || i == nx || j == 0 || j == ny) mesh.node_dirichlet[corner_id(i, j)] = true;
    for (const auto& [a, b] : free_edges(mesh))
        mesh.boundary_edges.push_back({a, b, EdgeTag::dirichlet});
    return mesh;
}

// Unique 56-bit key for snapped coordinates in (-2^27, 2^27).
inline std::uint64_t coord_key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x + (1LL << 27)) << 28) |
           static_cast<std::uint64_t>(y + (1LL << 27));
}

struct PointSoup {
    std::vector<cdt::IPoint> pts;
    std::vector<Vec2> coords;
    std::vector<std::pair<int, int>> segments;
    std::unordered_map<std::uint64_t, int> index;

    int add(double x, double y) {
        const cdt::IPoint ip{cdt::snap(x), cdt::snap(y)};
        const std::uint64_t key = coord_key(ip.x, ip.y);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(pts.size());
        pts.push_back(ip);
        coords.emplace_back(static_cast<double>(ip.x) / cdt::kSnapScale,
                            static_cast<double>(ip.y) / cdt::kSnapScale);
        index.emplace(key, id);
        return id;
    }
};

// Places ring points along the polygon with spacing <= h and registers the
// sub-edges as constraint segments. Returns the ring point ids.
std::vector<int> add_polygon_ring(PointSoup& soup, const Polygon& poly, double h) {
    std::vector<int> ring;
    const std::size_t n = poly.size();
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2& a = poly[e];
        const Vec2& b = poly[(e + 1) % n];
        const int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h)));
        for (int s = 0; s < m; ++s) {
            const double t = static_cast<double>(s) / m;
            ring.push_back(soup.add(a.x() + t * (b.x() - a.x()), a.y() + t * (b.y() - a.y())));
        }
    }
    for (std::size_t i = 0; i < ring.size(); ++i)
        soup.segments.emplace_back(ring[i], ring[(i + 1) % ring.size()]);
    return ring;
}

double distance_to_polygon_boundary(const Vec2& x, const Polygon& poly) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t e = 0; e < n; ++e) {
        const Vec2& a = poly[e];
        const Vec2& b = poly[(e + 1) % n];
        const Vec2 ab = b - a;
        const double t = std::clamp(ab.dot(x - a) / ab.squaredNorm(), 0.0, 1.0);
        d = std::min(d, (x - (a + t * ab)).norm());
    }
    return d;
}

struct PlacedInclusion {
    Polygon poly;
    double bx0, bx1, by0, by1;  // bounding box, padded by the protection radius
};

std::vector<PlacedInclusion> place_all(const Configuration& cfg, double pad) {
    std::vector<PlacedInclusion> out;
    out.reserve(cfg.placements.size());
    for (const auto& pl : cfg.placements) {
        PlacedInclusion pi;
        pi.poly = pl.transformed(cfg.shape);
        pi.bx0 = pi.by0 = std::numeric_limits<double>::infinity();
        pi.bx1 = pi.by1 = -std::numeric_limits<double>::infinity();
        for (const auto& v : pi.poly) {
            pi.bx0 = std::min(pi.bx0, v.x());
            pi.bx1 = std::max(pi.bx1, v.x());
            pi.by0 = std::min(pi.by0, v.y());
            pi.by1 = std::max(pi.by1, v.y());
        }
        pi.bx0 -= pad;
        pi.bx1 += pad;
        pi.by0 -= pad;
        pi.by1 += pad;
        out.push_back(std::move(pi));
    }
    return out;
}

void finalize_tags_window(Mesh& mesh, double side) {
    const std::int64_t s0 = cdt::snap(0.0), s1 = cdt::snap(side);
    mesh.node_master.assign(mesh.nodes.size(), -1);
    mesh.node_dirichlet.assign(mesh.nodes.size(), false);

    std::unordered_map<std::uint64_t, int> by_coord;
    std::vector<cdt::IPoint> snapped(mesh.nodes.size());
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        snapped[i] = {cdt::snap(mesh.nodes[i].x()), cdt::snap(mesh.nodes[i].y())};
        by_coord[coord_key(snapped[i].x, snapped[i].y)] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const bool sx = snapped[i].x == s1, sy = snapped[i].y == s1;
        if (!sx && !sy) continue;
        const std::int64_t mx = sx ? s0 : snapped[i].x;
        const std::int64_t my = sy ? s0 : snapped[i].y;
        auto it = by_coord.find(coord_key(mx, my));
        if (it == by_coord.end())
            throw std::runtime_error("build_mesh: unpaired periodic node");
        mesh.node_master[i] = it->second;
    }

    for (const auto& [a, b] : free_edges(mesh)) {
        EdgeTag tag = EdgeTag::dirichlet;
        auto on_line = [&](std::int64_t c) {
            return (snapped[a].x == c && snapped[b].x == c) || (snapped[a].y == c && snapped[b].y == c);
        };
        if (on_line(s0)) tag = EdgeTag::periodic_master;
        else if (on_line(s1)) tag = EdgeTag::periodic_slave;
        mesh.boundary_edges.push_back({a, b, tag});
    }
}

}  // namespace

Mesh build_shape_mesh(const InclusionShape& shape, double h) {
    if (h <= 0.0) throw std::invalid_argument("build_shape_mesh: h > 0 required");
    if (is_axis_aligned_rectangle(shape.boundary)) return criss_cross_rectangle(shape.boundary, h);

    PointSoup soup;
    add_polygon_ring(soup, shape.boundary, h);

    double xmin = shape.boundary[0].x(), xmax = xmin, ymin = shape.boundary[0].y(), ymax = ymin;
    for (const auto& v : shape.boundary) {
        xmin = std::min(xmin, v.x());
        xmax = std::max(xmax, v.x());
        ymin = std::min(ymin, v.y());
        ymax = std::max(ymax, v.y());
    }
    const double protect = 0.55 * h;
    const int gx = static_cast<int>(std::floor((xmax - xmin) / h));
    const int gy = static_cast<int>(std::floor((ymax - ymin) / h));
    for (int j = 1; j <= gy; ++j)
        for (int i = 1; i <= gx; ++i) {
            const Vec2 p(xmin + i * h, ymin + j * h);
            if (!point_in_polygon(p, shape.boundary)) continue;
            if (distance_to_polygon_boundary(p, shape.boundary) < protect) continue;
            soup.add(p.x(), p.y());
        }

    cdt::Triangulator tri;
    auto tris = tri.triangulate(soup.pts, soup.segments);

    Mesh mesh;
    mesh.h = h;
    mesh.nodes = soup.coords;
    for (const auto& t : tris) {
        const Vec2 c = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]) / 3.0;
        if (!point_in_polygon(c, shape.boundary)) continue;
        mesh.triangles.push_back(t);
    }
    mesh.tri_material.assign(mesh.triangles.size(), 0);
    mesh.tri_inclusion.assign(mesh.triangles.size(), -1);
    mesh.node_master.assign(mesh.nodes.size(), -1);
    mesh.node_dirichlet.assign(mesh.nodes.size(), false);
    for (const auto& [a, b] : free_edges(mesh)) {
        mesh.node_dirichlet[a] = mesh.node_dirichlet[b] = true;
        mesh.boundary_edges.push_back({a, b, EdgeTag::dirichlet});
    }
    check_not_degenerate(mesh);
    return mesh;
}

namespace {

Mesh build_window_mesh(const Configuration& cfg, double h, bool keep_inclusions,
                       bool holes_dirichlet) {
    if (h <= 0.0) throw std::invalid_argument("build_mesh: h > 0 required");
    const int L = cfg.window_side;

    PointSoup soup;
    const double protect = 0.55 * h;
    auto placed = place_all(cfg, protect);

    for (const auto& pi : placed) add_polygon_ring(soup, pi.poly, h);

    const int n_sub = std::max(1, static_cast<int>(std::llround(1.0 / h)));
    for (int j = 0; j <= L * n_sub; ++j)
        for (int i = 0; i <= L * n_sub; ++i) {
            const Vec2 p(static_cast<double>(i) / n_sub, static_cast<double>(j) / n_sub);
            bool drop = false;
            const bool domain_boundary = (i == 0 || j == 0 || i == L * n_sub || j == L * n_sub);
            for (const auto& pi : placed) {
                if (p.x() < pi.bx0 || p.x() > pi.bx1 || p.y() < pi.by0 || p.y() > pi.by1) continue;
                if (!keep_inclusions && point_in_polygon(p, pi.poly)) { drop = true; break; }
                if (distance_to_polygon_boundary(p, pi.poly) < protect) { drop = true; break; }
            }
            if (drop && domain_boundary)
                throw std::runtime_error("build_mesh: inclusion too close to the window boundary");
            if (!drop) soup.add(p.x(), p.y());
        }

    cdt::Triangulator tri;
    auto tris = tri.triangulate(soup.pts, soup.segments);

    Mesh mesh;
    mesh.h = h;
    mesh.nodes = soup.coords;
    for (const auto& t : tris) {
        const Vec2 c = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]) / 3.0;
        int inside = -1;
        for (std::size_t k = 0; k < placed.size(); ++k) {
            const auto& pi = placed[k];
            if (c.x() < pi.bx0 || c.x() > pi.bx1 || c.y() < pi.by0 || c.y() > pi.by1) continue;
            if (point_in_polygon(c, pi.poly)) { inside = static_cast<int>(k); break; }
        }
        if (inside >= 0 && !keep_inclusions) continue;
        mesh.triangles.push_back(t);
        mesh.tri_material.push_back(inside >= 0 ? 1 : 0);
        mesh.tri_inclusion.push_back(inside);
    }

    finalize_tags_window(mesh, static_cast<double>(L));

    if (!keep_inclusions) {
        // Hole boundaries: free edges not on the window frame.
        for (auto& e : mesh.boundary_edges) {
            if (e.tag == EdgeTag::dirichlet) {
                e.tag = holes_dirichlet ? EdgeTag::dirichlet : EdgeTag::interface;
                if (holes_dirichlet) {
                    mesh.node_dirichlet[e.a] = true;
                    mesh.node_dirichlet[e.b] = true;
                }
            }
        }
    }
    check_not_degenerate(mesh);
    return mesh;
}

}  // namespace

Mesh build_perforated_mesh(const Configuration& cfg, double h, bool holes_dirichlet) {
    return build_window_mesh(cfg, h, /*keep_inclusions=*/false, holes_dirichlet);
}

Mesh build_two_phase_mesh(const Configuration& cfg, double h) {
    return build_window_mesh(cfg, h, /*keep_inclusions=*/true, /*holes_dirichlet=*/false);
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os.precision(17);
    os << "hclab-mesh 1\n";
    os << "h " << mesh.h << "\n";
    os << "nodes " << mesh.nodes.size() << "\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        os << mesh.nodes[i].x() << " " << mesh.nodes[i].y() << " "
           << (mesh.node_dirichlet.empty() ? 0 : static_cast<int>(mesh.node_dirichlet[i])) << " "
           << (mesh.node_master.empty() ? -1 : mesh.node_master[i]) << "\n";
    os << "triangles " << mesh.triangles.size() << "\n";
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        os << mesh.triangles[t][0] << " " << mesh.triangles[t][1] << " " << mesh.triangles[t][2]
           << " " << mesh.tri_material[t] << " " << mesh.tri_inclusion[t] << "\n";
    os << "edges " << mesh.boundary_edges.size() << "\n";
    for (const auto& e : mesh.boundary_edges)
        os << e.a << " " << e.b << " " << static_cast<int>(e.tag) << "\n";
}

Mesh read_mesh(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "hclab-mesh" || version != 1) throw std::runtime_error("read_mesh: bad header");
    Mesh mesh;
    std::string word;
    std::size_t n = 0;
    is >> word >> mesh.h;
    is >> word >> n;
    mesh.nodes.resize(n);
    mesh.node_dirichlet.resize(n);
    mesh.node_master.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int d = 0, m = -1;
        is >> mesh.nodes[i].x() >> mesh.nodes[i].y() >> d >> m;
        mesh.node_dirichlet[i] = d != 0;
        mesh.node_master[i] = m;
    }
    is >> word >> n;
    mesh.triangles.resize(n);
    mesh.tri_material.resize(n);
    mesh.tri_inclusion.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        is >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2] >>
            mesh.tri_material[t] >> mesh.tri_inclusion[t];
    is >> word >> n;
    mesh.boundary_edges.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        int tag = 0;
        is >> mesh.boundary_edges[e].a >> mesh.boundary_edges[e].b >> tag;
        mesh.boundary_edges[e].tag = static_cast<EdgeTag>(tag);
    }
    if (!is) throw std::runtime_error("read_mesh: truncated input");
    return mesh;
}

}  // namespace hc
