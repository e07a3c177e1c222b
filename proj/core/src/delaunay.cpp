#include "hclab/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace hc::cdt {

using i128 = __int128;

std::int64_t snap(double v) { return std::llround(v * kSnapScale); }

namespace {

i128 orient(const IPoint& a, const IPoint& b, const IPoint& c) {
    return static_cast<i128>(b.x - a.x) * (c.y - a.y) -
           static_cast<i128>(b.y - a.y) * (c.x - a.x);
}

// > 0 iff p lies strictly inside the circumcircle of the CCW triangle (a,b,c).
i128 incircle(const IPoint& a, const IPoint& b, const IPoint& c, const IPoint& p) {
    const i128 adx = a.x - p.x, ady = a.y - p.y;
    const i128 bdx = b.x - p.x, bdy = b.y - p.y;
    const i128 cdx = c.x - p.x, cdy = c.y - p.y;
    const i128 ad = adx * adx + ady * ady;
    const i128 bd = bdx * bdx + bdy * bdy;
    const i128 cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - cdy * bd) - ady * (bdx * cd - cdx * bd) +
           ad * (bdx * cdy - cdx * bdy);
}

struct Tri {
    std::array<int, 3> v{-1, -1, -1};
    std::array<int, 3> adj{-1, -1, -1};  // adj[k] faces edge (v[k+1], v[k+2])
    bool alive = false;
};

struct Core {
    std::vector<IPoint> pts;
    std::vector<Tri> tris;
    std::vector<int> vert2tri;
    int hint = 0;

    int edge_index(const Tri& t, int a, int b) const {
        for (int k = 0; k < 3; ++k)
            if (t.v[(k + 1) % 3] == a && t.v[(k + 2) % 3] == b) return k;
        return -1;
    }

    void link(int t, int k, int u) {
        tris[t].adj[k] = u;
        if (u >= 0) {
            const int a = tris[t].v[(k + 1) % 3], b = tris[t].v[(k + 2) % 3];
            const int j = edge_index(tris[u], b, a);
            tris[u].adj[j] = t;
        }
    }

    int locate(int p) const {
        int t = hint;
        std::size_t steps = 0;
        const std::size_t cap = 4 * tris.size() + 64;
        while (true) {
            if (++steps > cap) break;  // fall through to the linear scan
            if (!tris[t].alive) { t = static_cast<int>(tris.size()) - 1; continue; }
            bool moved = false;
            for (int k = 0; k < 3; ++k) {
                const int a = tris[t].v[(k + 1) % 3], b = tris[t].v[(k + 2) % 3];
                if (orient(pts[a], pts[b], pts[p]) < 0) {
                    const int u = tris[t].adj[k];
                    if (u < 0) throw std::runtime_error("delaunay: walked out of the super-triangle");
                    t = u;
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
        }
        for (std::size_t i = 0; i < tris.size(); ++i) {
            if (!tris[i].alive) continue;
            bool inside = true;
            for (int k = 0; k < 3 && inside; ++k) {
                const int a = tris[i].v[(k + 1) % 3], b = tris[i].v[(k + 2) % 3];
                if (orient(pts[a], pts[b], pts[p]) < 0) inside = false;
            }
            if (inside) return static_cast<int>(i);
        }
        throw std::runtime_error("delaunay: point location failed");
    }

    void insert(int p) {
        const int t0 = locate(p);

        // Cavity: breadth-first growth over strict in-circumcircle tests.
        std::vector<int> cavity{t0};
        std::vector<char> in_cavity(tris.size(), 0);
        in_cavity[t0] = 1;
        std::vector<int> stack{t0};
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                const int u = tris[t].adj[k];
                if (u < 0 || in_cavity[u]) continue;
                const Tri& tu = tris[u];
                if (incircle(pts[tu.v[0]], pts[tu.v[1]], pts[tu.v[2]], pts[p]) > 0) {
                    in_cavity[u] = 1;
                    cavity.push_back(u);
                    stack.push_back(u);
                }
            }
        }

        // Boundary of the cavity as directed edges; expand the cavity when a
        // fan triangle would be degenerate (p collinear with a boundary edge).
        struct BEdge { int a, b, ext; };
        std::vector<BEdge> boundary;
        while (true) {
            boundary.clear();
            bool expanded = false;
            for (std::size_t ci = 0; ci < cavity.size() && !expanded; ++ci) {
                const int t = cavity[ci];
                for (int k = 0; k < 3; ++k) {
                    const int u = tris[t].adj[k];
                    if (u >= 0 && in_cavity[u]) continue;
                    const int a = tris[t].v[(k + 1) % 3], b = tris[t].v[(k + 2) % 3];
                    if (orient(pts[p], pts[a], pts[b]) <= 0) {
                        if (u < 0) throw std::runtime_error("delaunay: degenerate cavity at hull");
                        in_cavity[u] = 1;
                        cavity.push_back(u);
                        expanded = true;
                        break;
                    }
                    boundary.push_back({a, b, u});
                }
            }
            if (!expanded) break;
        }

        for (int t : cavity) tris[t].alive = false;

        // Fan around p. New triangle for boundary edge (a,b) is (p,a,b).
        std::unordered_map<long long, std::pair<int, int>> open;  // directed edge -> (tri, slot)
        auto ekey = [](int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); };
        for (const BEdge& e : boundary) {
            Tri nt;
            nt.v = {p, e.a, e.b};
            nt.alive = true;
            const int id = static_cast<int>(tris.size());
            tris.push_back(nt);
            link(id, 0, e.ext);  // edge (a,b) faces the external triangle
            // Edges (b,p) and (p,a) pair with sibling fan triangles.
            for (int k = 1; k < 3; ++k) {
                const int a = tris[id].v[(k + 1) % 3], b = tris[id].v[(k + 2) % 3];
                auto it = open.find(ekey(b, a));
                if (it != open.end()) {
                    link(id, k, it->second.first);
                    open.erase(it);
                } else {
                    open[ekey(a, b)] = {id, k};
                }
            }
            vert2tri.resize(pts.size(), -1);
            vert2tri[p] = id;
            vert2tri[e.a] = id;
            vert2tri[e.b] = id;
            hint = id;
        }
        if (!open.empty()) throw std::runtime_error("delaunay: cavity boundary not closed");
    }

    // All alive triangles incident to vertex a.
    std::vector<int> star(int a) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < tris.size(); ++i) {
            if (!tris[i].alive) continue;
            if (tris[i].v[0] == a || tris[i].v[1] == a || tris[i].v[2] == a)
                out.push_back(static_cast<int>(i));
        }
        return out;
    }

    // Fast star via adjacency rotation; falls back to the scan if the walk
    // leaves the interior (never happens with the enclosing super-triangle).
    std::vector<int> star_fast(int a) const {
        std::vector<int> out;
        int t0 = vert2tri[a];
        if (t0 < 0 || !tris[t0].alive) return star(a);
        int t = t0;
        do {
            out.push_back(t);
            int i = -1;
            for (int k = 0; k < 3; ++k)
                if (tris[t].v[k] == a) i = k;
            const int u = tris[t].adj[(i + 1) % 3];  // rotate CCW around a
            if (u < 0 || !tris[u].alive) return star(a);
            t = u;
        } while (t != t0 && out.size() <= tris.size());
        return out;
    }

    bool edge_exists(int a, int b) const {
        for (int t : star_fast(a))
            for (int k = 0; k < 3; ++k)
                if (tris[t].v[k] == b) return true;
        return false;
    }

    // Delaunay-ish pocket triangulation against base edge (u,v); the chain
    // lies strictly to the left of u -> v. Returns new triangle ids.
    void fill_pocket(int u, int v, const std::vector<int>& chain, std::vector<int>& created) {
        if (chain.empty()) return;
        std::size_t ci = 0;
        for (std::size_t i = 1; i < chain.size(); ++i)
            if (incircle(pts[u], pts[v], pts[chain[ci]], pts[chain[i]]) > 0) ci = i;
        Tri nt;
        nt.v = {u, v, chain[ci]};
        nt.alive = true;
        const int id = static_cast<int>(tris.size());
        tris.push_back(nt);
        created.push_back(id);
        fill_pocket(u, chain[ci], std::vector<int>(chain.begin(), chain.begin() + ci), created);
        fill_pocket(chain[ci], v, std::vector<int>(chain.begin() + ci + 1, chain.end()), created);
    }

    // Links `created` triangles among themselves and to the still-alive
    // `external` triangles whose slots point at removed (dead) triangles.
    void rewire(const std::vector<int>& created, const std::vector<int>& external) {
        std::map<std::pair<int, int>, std::pair<int, int>> half;  // directed edge -> (tri, slot)
        for (int t : created) {
            for (int k = 0; k < 3; ++k) {
                tris[t].adj[k] = -1;
                half[{tris[t].v[(k + 1) % 3], tris[t].v[(k + 2) % 3]}] = {t, k};
            }
        }
        for (auto& [e, slot] : half) {
            auto it = half.find({e.second, e.first});
            if (it != half.end()) tris[slot.first].adj[slot.second] = it->second.first;
        }
        for (int t : external) {
            if (!tris[t].alive) continue;
            for (int k = 0; k < 3; ++k) {
                const int n = tris[t].adj[k];
                if (n >= 0 && tris[n].alive) continue;
                const int a = tris[t].v[(k + 1) % 3], b = tris[t].v[(k + 2) % 3];
                auto it = half.find({b, a});
                if (it != half.end()) {
                    tris[t].adj[k] = it->second.first;
                    tris[it->second.first].adj[it->second.second] = t;
                }
            }
        }
    }

    void recover_segment(int a, int b) {
        if (edge_exists(a, b)) return;

        // Find the triangle at `a` whose opposite edge straddles segment (a,b).
        int t = -1, u = -1, v = -1;
        for (int cand : star_fast(a)) {
            int i = -1;
            for (int k = 0; k < 3; ++k)
                if (tris[cand].v[k] == a) i = k;
            const int p = tris[cand].v[(i + 1) % 3], q = tris[cand].v[(i + 2) % 3];
            const i128 op = orient(pts[a], pts[b], pts[p]);
            const i128 oq = orient(pts[a], pts[b], pts[q]);
            if (op > 0 && oq < 0 && orient(pts[p], pts[q], pts[b]) <= 0) {
                t = cand;
                u = p;
                v = q;
                break;
            }
        }
        if (t < 0) {
            // A vertex lies exactly on the segment: split the recovery.
            for (int cand : star_fast(a)) {
                for (int k = 0; k < 3; ++k) {
                    const int w = tris[cand].v[k];
                    if (w == a || w == b) continue;
                    if (orient(pts[a], pts[b], pts[w]) == 0) {
                        const bool between =
                            std::min(pts[a].x, pts[b].x) <= pts[w].x && pts[w].x <= std::max(pts[a].x, pts[b].x) &&
                            std::min(pts[a].y, pts[b].y) <= pts[w].y && pts[w].y <= std::max(pts[a].y, pts[b].y);
                        if (between) {
                            recover_segment(a, w);
                            recover_segment(w, b);
                            return;
                        }
                    }
                }
            }
            throw std::runtime_error("delaunay: segment recovery failed to start");
        }

        // March the pipe of crossed triangles up to b.
        std::vector<int> pipe{t};
        std::vector<int> upper{u}, lower{v};
        std::vector<int> external;  // rewire set
        while (true) {
            const Tri& tt = tris[pipe.back()];
            // The crossed edge is directed (upper.back(), lower.back()) in the
            // current triangle; its adjacency slot leads across the segment.
            const int k = edge_index(tt, upper.back(), lower.back());
            if (k < 0) throw std::runtime_error("delaunay: pipe lost the crossing edge");
            const int nxt = tt.adj[k];
            if (nxt < 0) throw std::runtime_error("delaunay: pipe left the triangulation");
            pipe.push_back(nxt);
            int w = -1;
            for (int kk = 0; kk < 3; ++kk) {
                const int cand2 = tris[nxt].v[kk];
                if (cand2 != upper.back() && cand2 != lower.back()) w = cand2;
            }
            if (w == b) break;
            const i128 ow = orient(pts[a], pts[b], pts[w]);
            if (ow > 0) upper.push_back(w);
            else if (ow < 0) lower.push_back(w);
            else {
                // w exactly on the segment: recover in two halves.
                recover_segment(a, w);
                recover_segment(w, b);
                return;
            }
        }

        // External neighbors of the pipe, for adjacency rewiring.
        for (int pt : pipe)
            for (int k = 0; k < 3; ++k) {
                const int n = tris[pt].adj[k];
                if (n >= 0 && std::find(pipe.begin(), pipe.end(), n) == pipe.end())
                    external.push_back(n);
            }
        for (int pt : pipe) tris[pt].alive = false;

        std::vector<int> created;
        // Upper chain lies left of a->b; lower chain left of b->a.
        fill_pocket(a, b, upper, created);
        std::vector<int> lower_rev(lower.rbegin(), lower.rend());
        fill_pocket(b, a, lower_rev, created);

        rewire(created, external);
        for (int id : created) {
            for (int k = 0; k < 3; ++k) vert2tri[tris[id].v[k]] = id;
            hint = id;
        }
    }
};

}  // namespace

std::vector<std::array<int, 3>> Triangulator::triangulate(
    const std::vector<IPoint>& points, const std::vector<std::pair<int, int>>& segments) {
    Core core;
    const int n = static_cast<int>(points.size());
    if (n < 3) throw std::invalid_argument("triangulate: need at least 3 points");
    core.pts = points;

    // Enclosing super-triangle, far outside the snapped input range but
    // within the exact-arithmetic budget.
    const std::int64_t big = (1LL << 28);
    core.pts.push_back({-big, -big});
    core.pts.push_back({big, -big});
    core.pts.push_back({0, big});
    Tri super;
    super.v = {n, n + 1, n + 2};
    super.alive = true;
    core.tris.push_back(super);
    core.vert2tri.assign(core.pts.size(), -1);

    // Morton-order insertion for walk locality; deterministic.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    auto morton = [](std::int64_t x, std::int64_t y) {
        std::uint64_t code = 0;
        std::uint64_t ux = static_cast<std::uint64_t>(x + (1LL << 29));
        std::uint64_t uy = static_cast<std::uint64_t>(y + (1LL << 29));
        for (int b = 0; b < 30; ++b) {
            code |= ((ux >> b) & 1ULL) << (2 * b);
            code |= ((uy >> b) & 1ULL) << (2 * b + 1);
        }
        return code;
    };
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const auto mi = morton(points[i].x, points[i].y), mj = morton(points[j].x, points[j].y);
        if (mi != mj) return mi < mj;
        return i < j;
    });

    for (int i : order) core.insert(i);
    for (const auto& [a, b] : segments) core.recover_segment(a, b);

    std::vector<std::array<int, 3>> out;
    for (const Tri& t : core.tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;  // touches the super-triangle
        out.push_back(t.v);
    }
    return out;
}

}  // namespace hc::cdt
