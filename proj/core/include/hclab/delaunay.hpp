#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace hc::cdt {

/// Snapped integer coordinates. All predicates are evaluated exactly in
/// extended integer arithmetic, so the triangulation is deterministic and
/// immune to round-off, including on structured grids full of collinear and
/// cocircular point groups.
struct IPoint {
    std::int64_t x = 0, y = 0;
    bool operator==(const IPoint& o) const { return x == o.x && y == o.y; }
};

/// Coordinate snapping scale: doubles are multiplied by 2^21 and rounded.
/// Valid input range is |x| < 2^26 / 2^21 = 32 after the caller's own
/// normalization; predicates stay within __int128 for coordinates up to
/// 2^28 (super-triangle included).
constexpr double kSnapScale = 2097152.0;  // 2^21

std::int64_t snap(double v);

/// Constrained Delaunay triangulation of a point set. Constraint segments
/// (pairs of point indices) are recovered by pipe retriangulation and are
/// guaranteed to appear as edges of the result. Triangles are CCW.
class Triangulator {
public:
    /// `points` must be free of duplicates. Returns triangles as index
    /// triples into `points`.
    std::vector<std::array<int, 3>> triangulate(
        const std::vector<IPoint>& points,
        const std::vector<std::pair<int, int>>& segments);
};

}  // namespace hc::cdt
