#include "hclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hc {

double polygon_area(const Polygon& p) {
    double twice = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p[i];
        const Vec2& b = p[(i + 1) % n];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

Vec2 polygon_centroid(const Polygon& p) {
    double a6 = 0.0;
    Vec2 c(0.0, 0.0);
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& u = p[i];
        const Vec2& v = p[(i + 1) % n];
        const double cross = u.x() * v.y() - v.x() * u.y();
        a6 += cross;
        c += (u + v) * cross;
    }
    return c / (3.0 * a6);
}

double polygon_diameter(const Polygon& p) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            d2 = std::max(d2, (p[i] - p[j]).squaredNorm());
    return std::sqrt(d2);
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    return q.x() <= std::max(p.x(), r.x()) && q.x() >= std::min(p.x(), r.x()) &&
           q.y() <= std::max(p.y(), r.y()) && q.y() >= std::min(p.y(), r.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(q1, p1, q2)) return true;
    if (d2 == 0 && on_segment(q1, p2, q2)) return true;
    if (d3 == 0 && on_segment(p1, q1, p2)) return true;
    if (d4 == 0 && on_segment(p1, q2, p2)) return true;
    return false;
}

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double t = std::clamp(ab.dot(x - a) / ab.squaredNorm(), 0.0, 1.0);
    return (x - (a + t * ab)).norm();
}

}  // namespace

bool polygon_is_simple(const Polygon& p) {
    const std::size_t n = p.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip edges sharing a vertex.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
        }
    }
    return true;
}

bool point_in_polygon(const Vec2& x, const Polygon& p) {
    bool inside = false;
    const std::size_t n = p.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool crosses = (p[i].y() > x.y()) != (p[j].y() > x.y());
        if (crosses) {
            const double t = (x.y() - p[i].y()) / (p[j].y() - p[i].y());
            if (x.x() < p[i].x() + t * (p[j].x() - p[i].x())) inside = !inside;
        }
    }
    return inside;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
    for (const auto& v : a)
        if (point_in_polygon(v, b)) return true;
    for (const auto& v : b)
        if (point_in_polygon(v, a)) return true;
    const std::size_t na = a.size(), nb = b.size();
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            if (segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])) return true;
    return false;
}

double polygon_distance(const Polygon& a, const Polygon& b) {
    if (polygons_overlap(a, b)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    const std::size_t na = a.size(), nb = b.size();
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            d = std::min(d, point_segment_distance(a[i], b[j], b[(j + 1) % nb]));
            d = std::min(d, point_segment_distance(b[j], a[i], a[(i + 1) % na]));
        }
    return d;
}

Vec2 InclusionShape::shift_vector() const {
    Vec2 d(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    for (const auto& v : boundary) {
        d.x() = std::min(d.x(), v.x());
        d.y() = std::min(d.y(), v.y());
    }
    return d;
}

InclusionShape make_shape(const std::string& id, Polygon boundary) {
    if (boundary.size() < 3) throw std::invalid_argument("make_shape: need >= 3 vertices");
    if (polygon_area(boundary) <= 0.0)
        throw std::invalid_argument("make_shape: polygon must be positively oriented");
    if (!polygon_is_simple(boundary)) throw std::invalid_argument("make_shape: polygon not simple");
    return InclusionShape{id, std::move(boundary)};
}

InclusionShape rectangle_shape(double l1, double l2, const std::string& id) {
    const double a = 0.5 * l1, b = 0.5 * l2;
    return make_shape(id, {{-a, -b}, {a, -b}, {a, b}, {-a, b}});
}

InclusionShape square_shape(double side, const std::string& id) {
    return rectangle_shape(side, side, id);
}

InclusionShape disk_shape(double radius, int segments, const std::string& id) {
    Polygon p;
    p.reserve(segments);
    for (int k = 0; k < segments; ++k) {
        const double t = 2.0 * M_PI * k / segments;
        p.emplace_back(radius * std::cos(t), radius * std::sin(t));
    }
    return make_shape(id, std::move(p));
}

Eigen::Matrix2d SymmetryOp::matrix() const {
    Eigen::Matrix2d m;
    switch (kind) {
        case Kind::reflect_x1: m << -1, 0, 0, 1; break;
        case Kind::reflect_x2: m << 1, 0, 0, -1; break;
        case Kind::rotate_quarter: {
            m.setIdentity();
            Eigen::Matrix2d r;
            r << 0, -1, 1, 0;
            for (int k = 0; k < ((power % 4) + 4) % 4; ++k) m = r * m;
            break;
        }
    }
    return m;
}

InclusionShape apply_symmetry(const InclusionShape& shape, const SymmetryOp& op) {
    const Eigen::Matrix2d m = op.matrix();
    Polygon out;
    out.reserve(shape.boundary.size());
    for (const auto& v : shape.boundary) out.push_back(m * v);
    if (op.is_reflection()) std::reverse(out.begin(), out.end());  // restore CCW
    // Re-normalize to the reference frame: centroid back at the origin.
    const Vec2 c = polygon_centroid(out);
    for (auto& v : out) v -= c;
    return InclusionShape{shape.id, std::move(out)};
}

void InclusionModel::validate() const {
    if (base_shape.boundary.size() < 3) throw std::invalid_argument("model: missing base shape");
    if (kind == ModelKind::iid_rotation) {
        const auto& p = probabilities;
        if (p.empty()) return;  // defaults applied at sampling time
        double s = 0.0;
        for (double w : p) {
            if (w < 0.0) throw std::invalid_argument("model: negative weight");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("model: weights must sum to 1");
    }
    if (kind == ModelKind::iid_scaling) {
        if (scaling.continuous) {
            if (!(0.0 < scaling.r1 && scaling.r1 < scaling.r2 && scaling.r2 < 1.0))
                throw std::invalid_argument("model: scaling range must satisfy 0 < r1 < r2 < 1");
        } else {
            if (scaling.atoms.empty()) throw std::invalid_argument("model: no scaling atoms");
            double s = 0.0;
            for (auto [r, w] : scaling.atoms) {
                if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("model: atom scale out of (0,1)");
                if (w < 0.0) throw std::invalid_argument("model: negative weight");
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw std::invalid_argument("model: scaling weights must sum to 1");
        }
    }
}

double InclusionModel::expected_volume_fraction() const {
    const double a = base_shape.area();
    switch (kind) {
        case ModelKind::periodic_single:
        case ModelKind::periodic_triple_rotation:
        case ModelKind::iid_rotation: return a;
        case ModelKind::iid_scaling: {
            if (scaling.continuous) {
                // E[r^2] for r ~ U[r1, r2].
                const double r1 = scaling.r1, r2 = scaling.r2;
                return a * (r2 * r2 * r2 - r1 * r1 * r1) / (3.0 * (r2 - r1));
            }
            double e = 0.0;
            for (auto [r, w] : scaling.atoms) e += w * r * r;
            return a * e;
        }
    }
    return a;
}

Polygon Placement::transformed(const InclusionShape& shape) const {
    Eigen::Matrix2d m = SymmetryOp{SymmetryOp::Kind::rotate_quarter, rotation}.matrix();
    if (reflected) m = m * SymmetryOp{SymmetryOp::Kind::reflect_x1, 1}.matrix();
    const Vec2 center(cell_x + 0.5, cell_y + 0.5);
    Polygon out;
    out.reserve(shape.boundary.size());
    for (const auto& v : shape.boundary) out.push_back(center + m * (scale * v));
    if (reflected) std::reverse(out.begin(), out.end());
    return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t cell_key(std::uint64_t seed, int cx, int cy) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) * 0x9E3779B97F4A7C15ULL;
    (void)splitmix64(s);
    s ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy)) * 0xC2B2AE3D27D4EB4FULL;
    (void)splitmix64(s);
    return s;
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

namespace {

double containment_margin(const Polygon& placed, int cx, int cy) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : placed) {
        m = std::min(m, v.x() - cx);
        m = std::min(m, cx + 1.0 - v.x());
        m = std::min(m, v.y() - cy);
        m = std::min(m, cy + 1.0 - v.y());
    }
    return m;
}

}  // namespace

Configuration generate_configuration(const InclusionModel& model, int window_side,
                                     std::uint64_t seed) {
    if (window_side < 1) throw std::invalid_argument("generate_configuration: L >= 1 required");
    model.validate();

    Configuration cfg;
    cfg.window_side = window_side;
    cfg.seed = seed;
    cfg.shape = model.base_shape;
    cfg.placements.reserve(static_cast<std::size_t>(window_side) * window_side);

    std::vector<double> rot_weights = model.probabilities;
    if (model.kind == ModelKind::iid_rotation && rot_weights.empty())
        rot_weights = {0.5, 0.5};  // two distinct quarter-turn orientations

    for (int cy = 0; cy < window_side; ++cy)
        for (int cx = 0; cx < window_side; ++cx) {
            Placement pl;
            pl.cell_x = cx;
            pl.cell_y = cy;
            switch (model.kind) {
                case ModelKind::periodic_single: break;
                case ModelKind::periodic_triple_rotation:
                    pl.rotation = (cx + cy) % 2;  // checkerboard of quarter turns
                    break;
                case ModelKind::iid_rotation: {
                    std::uint64_t s = cell_key(seed, cx, cy);
                    double u = uniform01(s);
                    std::size_t k = 0;
                    while (k + 1 < rot_weights.size() && u >= rot_weights[k]) {
                        u -= rot_weights[k];
                        ++k;
                    }
                    pl.rotation = static_cast<int>(k);
                    break;
                }
                case ModelKind::iid_scaling: {
                    std::uint64_t s = cell_key(seed, cx, cy);
                    const double u = uniform01(s);
                    if (model.scaling.continuous) {
                        pl.scale = model.scaling.r1 + u * (model.scaling.r2 - model.scaling.r1);
                    } else {
                        double acc = 0.0;
                        pl.scale = model.scaling.atoms.back().first;
                        for (auto [r, w] : model.scaling.atoms) {
                            acc += w;
                            if (u < acc) {
                                pl.scale = r;
                                break;
                            }
                        }
                    }
                    break;
                }
            }
            const Polygon placed = pl.transformed(model.base_shape);
            if (containment_margin(placed, cx, cy) < 0.05)
                throw std::runtime_error("generate_configuration: shape too large for cell (" +
                                         std::to_string(cx) + "," + std::to_string(cy) + ")");
            cfg.placements.push_back(pl);
        }
    return cfg;
}

ValidationReport validate_assumptions(const Configuration& cfg) {
    ValidationReport rep;
    rep.pass = true;
    rep.min_separation = std::numeric_limits<double>::infinity();

    std::vector<Polygon> placed;
    placed.reserve(cfg.placements.size());
    for (const auto& pl : cfg.placements) placed.push_back(pl.transformed(cfg.shape));

    for (std::size_t i = 0; i < cfg.placements.size(); ++i) {
        InclusionCheck chk;
        chk.index = i;
        chk.diameter = polygon_diameter(placed[i]);
        chk.diameter_ok = chk.diameter < 0.5;
        chk.margin = containment_margin(placed[i], cfg.placements[i].cell_x, cfg.placements[i].cell_y);
        chk.containment_ok = chk.margin >= 0.05 - 1e-12;
        if (!chk.diameter_ok || !chk.containment_ok) rep.pass = false;
        rep.inclusions.push_back(chk);
    }

    // Pairwise disjointness; only same or adjacent cells can interact.
    for (std::size_t i = 0; i < placed.size(); ++i)
        for (std::size_t j = i + 1; j < placed.size(); ++j) {
            const auto& a = cfg.placements[i];
            const auto& b = cfg.placements[j];
            if (std::abs(a.cell_x - b.cell_x) > 1 || std::abs(a.cell_y - b.cell_y) > 1) continue;
            if (polygons_overlap(placed[i], placed[j])) {
                rep.overlaps.emplace_back(i, j);
                rep.pass = false;
                rep.min_separation = 0.0;
            } else {
                rep.min_separation = std::min(rep.min_separation, polygon_distance(placed[i], placed[j]));
            }
        }
    if (!std::isfinite(rep.min_separation)) rep.min_separation = 0.0;
    return rep;
}

std::vector<double> volume_fraction_average(const Configuration& cfg, int sub_side) {
    if (sub_side > cfg.window_side)
        throw std::invalid_argument("volume_fraction_average: sub-cube exceeds window");
    const int L = cfg.window_side;
    // Per-cell inclusion areas (each inclusion is contained in its cell).
    std::vector<double> cell_area(static_cast<std::size_t>(L) * L, 0.0);
    for (const auto& pl : cfg.placements) {
        const double a = cfg.shape.area() * pl.scale * pl.scale;
        cell_area[static_cast<std::size_t>(pl.cell_y) * L + pl.cell_x] += a;
    }
    std::vector<double> out;
    for (int oy = 0; oy + sub_side <= L; ++oy)
        for (int ox = 0; ox + sub_side <= L; ++ox) {
            double s = 0.0;
            for (int y = oy; y < oy + sub_side; ++y)
                for (int x = ox; x < ox + sub_side; ++x)
                    s += cell_area[static_cast<std::size_t>(y) * L + x];
            out.push_back(s / (static_cast<double>(sub_side) * sub_side));
        }
    return out;
}

}  // namespace hc
