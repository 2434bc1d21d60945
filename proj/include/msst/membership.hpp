#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "msst/geometry.hpp"
#include "msst/polytope.hpp"

namespace msst {

/// Logarithmic-time strict point-in-polytope queries.
///
/// Small polytopes are answered by testing each facet. Larger ones get a
/// nested hierarchy of inner polytopes: level 0 is the triangulated
/// boundary, and each coarser level removes an independent set of
/// low-degree vertices and re-triangulates the holes with faces of the
/// convex hull of each removed vertex's link. A query follows the ray from a
/// fixed interior point `o` through x. The facet where that ray leaves the
/// coarsest level is found by scanning it; going one level finer, the exit
/// facet either survives unchanged or lies in the star of the single vertex
/// whose hole contains the coarse exit facet. At level 0 the exit facet is
/// tested against its exact supporting constraint.
class MembershipStructure {
public:
    /// Vertices of higher degree are never removed.
    static constexpr int kMaxRemovalDegree = 8;
    /// Polytopes with at most this many facets are scanned directly.
    static constexpr std::size_t kFlatFacetLimit = 16;
    /// The hierarchy stops once a level has this few triangles.
    static constexpr std::size_t kTopTriangleLimit = 24;
    /// Relative slack allowed when checking hole convexity.
    static constexpr double kHoleTol = 1e-10;

    MembershipStructure() = default;

    MembershipStructure(const ConvexPolytope3& poly, double eps) : eps_(eps) {
        if (poly.empty) return;
        if (poly.facets.size() <= kFlatFacetLimit) {
            kind_ = Kind::Flat;
            // Ball facets first: in-box queries never fail a box facet.
            for (const auto& f : poly.facets) {
                if (f.plane.from_ball()) planes_.push_back(f.plane);
            }
            for (const auto& f : poly.facets) {
                if (!f.plane.from_ball()) planes_.push_back(f.plane);
            }
            return;
        }
        kind_ = Kind::Hierarchy;
        build_hierarchy(poly);
    }

    bool is_empty() const { return kind_ == Kind::Empty; }
    bool is_hierarchical() const { return kind_ == Kind::Hierarchy; }

    /// Number of hierarchy levels above the base boundary (0 when flat).
    int depth() const {
        return levels_.empty() ? 0 : static_cast<int>(levels_.size()) - 1;
    }

    std::size_t top_size() const { return levels_.empty() ? planes_.size() : levels_.back().tris.size(); }

    /// Strict interior test. `tests`, when given, is incremented by the
    /// number of plane-side evaluations performed.
    bool contains(const Vec3& x, std::uint64_t* tests = nullptr) const {
        std::uint64_t count = 0;
        bool inside = false;
        switch (kind_) {
        case Kind::Empty:
            break;
        case Kind::Flat:
            inside = true;
            for (const auto& h : planes_) {
                ++count;
                if (!h.contains_strict(x, eps_)) {
                    inside = false;
                    break;
                }
            }
            break;
        case Kind::Hierarchy:
            inside = contains_hierarchical(x, count);
            break;
        }
        if (tests) *tests += count;
        return inside;
    }

private:
    enum class Kind { Empty, Flat, Hierarchy };

    struct Tri {
        std::array<int, 3> v{};
        Vec3 m;          ///< outward normal scaled so that m.(y - o) = 1 on the plane
        int link{-1};    ///< finer-level index when carried, else owner in the finer star table
        bool carried{false};
        int facet{-1};   ///< level 0 only: source facet
    };

    struct Level {
        std::vector<Tri> tris;
        // Stars (in this level's triangles) of the vertices removed to form
        // the next coarser level, in CSR form.
        std::vector<int> star_begin;
        std::vector<int> star_data;
    };

    double exit_ratio(const Tri& t, const Vec3& x) const { return dot(t.m, x - origin_); }

    bool contains_hierarchical(const Vec3& x, std::uint64_t& count) const {
        const Level& top = levels_.back();
        int best = 0;
        double best_r = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < top.tris.size(); ++i) {
            ++count;
            const double r = exit_ratio(top.tris[i], x);
            if (r > best_r) {
                best_r = r;
                best = static_cast<int>(i);
            }
        }
        for (std::size_t lv = levels_.size() - 1; lv > 0; --lv) {
            const Tri& t = levels_[lv].tris[best];
            if (t.carried) {
                best = t.link;
                continue;
            }
            const Level& finer = levels_[lv - 1];
            best_r = -std::numeric_limits<double>::infinity();
            for (int k = finer.star_begin[t.link]; k < finer.star_begin[t.link + 1]; ++k) {
                const int cand = finer.star_data[k];
                ++count;
                const double r = exit_ratio(finer.tris[cand], x);
                if (r > best_r) {
                    best_r = r;
                    best = cand;
                }
            }
        }
        ++count;
        return planes_[levels_[0].tris[best].facet].contains_strict(x, eps_);
    }

    static Vec3 scaled_normal(const Vec3& outward, const Vec3& on_plane, const Vec3& origin) {
        const double h = dot(outward, on_plane - origin);
        return outward / h;
    }

    void build_hierarchy(const ConvexPolytope3& poly) {
        verts_ = poly.vertices;
        const std::size_t nv = verts_.size();
        std::vector<char> locked(nv, 0);
        pick_interior_point(locked);

        Level base;
        for (std::size_t f = 0; f < poly.facets.size(); ++f) {
            const auto& facet = poly.facets[f];
            planes_.push_back(facet.plane);
            const HalfSpace& h = facet.plane;
            // x . c >= b  <=>  (-c) . (x - o) <= c . o - b
            const double hgt = dot(h.normal, origin_) - h.offset;
            const Vec3 m = -h.normal / hgt;
            const auto ring = poly.ring(f);
            for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
                Tri t;
                t.v = {ring[0], ring[i], ring[i + 1]};
                t.m = m;
                t.facet = static_cast<int>(f);
                base.tris.push_back(t);
            }
        }
        levels_.push_back(std::move(base));

        std::vector<char> alive(nv, 1);
        while (levels_.back().tris.size() > kTopTriangleLimit) {
            if (!coarsen(alive, locked)) break;
        }
    }

    /// Interior point: centroid of a large tetrahedron spanned by four
    /// vertices, which are then never removed.
    void pick_interior_point(std::vector<char>& locked) {
        const std::size_t nv = verts_.size();
        std::size_t a = 0;
        for (std::size_t i = 1; i < nv; ++i) {
            if (verts_[i].x < verts_[a].x) a = i;
        }
        std::size_t b = a;
        for (std::size_t i = 0; i < nv; ++i) {
            if (dist2(verts_[i], verts_[a]) > dist2(verts_[b], verts_[a])) b = i;
        }
        const Vec3 ab = verts_[b] - verts_[a];
        std::size_t c = a;
        double best = -1.0;
        for (std::size_t i = 0; i < nv; ++i) {
            const double d = norm2(cross(verts_[i] - verts_[a], ab));
            if (d > best) {
                best = d;
                c = i;
            }
        }
        const Vec3 n = cross(ab, verts_[c] - verts_[a]);
        std::size_t d = a;
        best = -1.0;
        for (std::size_t i = 0; i < nv; ++i) {
            const double h = std::abs(dot(verts_[i] - verts_[a], n));
            if (h > best) {
                best = h;
                d = i;
            }
        }
        origin_ = (verts_[a] + verts_[b] + verts_[c] + verts_[d]) * 0.25;
        locked[a] = locked[b] = locked[c] = locked[d] = 1;
    }

    /// Link of `v` as a cycle, ordered so that (v, L[j], L[j+1]) are the
    /// outward-oriented star triangles. Empty on a non-manifold star.
    static std::vector<int> link_cycle(int v, const std::vector<Tri>& tris, const int* star, int deg) {
        std::vector<std::pair<int, int>> edges;
        edges.reserve(deg);
        for (int k = 0; k < deg; ++k) {
            const auto& t = tris[star[k]].v;
            const int r = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
            edges.emplace_back(t[(r + 1) % 3], t[(r + 2) % 3]);
        }
        std::vector<int> cycle;
        cycle.reserve(deg);
        cycle.push_back(edges[0].first);
        int cur = edges[0].second;
        while (cur != cycle.front()) {
            if (static_cast<int>(cycle.size()) >= deg) return {};
            cycle.push_back(cur);
            int next = -1;
            for (const auto& e : edges) {
                if (e.first == cur) {
                    next = e.second;
                    break;
                }
            }
            if (next < 0) return {};
            cur = next;
        }
        if (static_cast<int>(cycle.size()) != deg) return {};
        return cycle;
    }

    /// Triangulates the hole left by removing `v` with faces of the convex
    /// hull of its link. Minimizes the worst convexity violation over all
    /// triangulations of the link polygon; fails when that is not within
    /// tolerance.
    bool fill_hole(int v, const std::vector<int>& link, std::vector<std::array<int, 3>>& out) const {
        const int d = static_cast<int>(link.size());
        double size = 0.0;
        for (int id : link) size = std::max(size, dist(verts_[id], verts_[v]));
        const double tol = kHoleTol * (size + detail::max_abs(verts_[v] - origin_));
        const double inf = std::numeric_limits<double>::infinity();

        auto tri_cost = [&](int i, int k, int j) {
            const Vec3& a = verts_[link[i]];
            const Vec3 n = cross(verts_[link[k]] - a, verts_[link[j]] - a);
            const double len = norm(n);
            if (len <= 1e-12 * size * size) return inf;
            const Vec3 u = n / len;
            if (dot(u, a - origin_) <= tol) return inf;
            if (dot(u, verts_[v] - a) < -tol) return inf;
            double worst = 0.0;
            for (int q = 0; q < d; ++q) {
                if (q == i || q == k || q == j) continue;
                worst = std::max(worst, dot(u, verts_[link[q]] - a));
            }
            return worst;
        };

        constexpr int kMax = kMaxRemovalDegree;
        std::array<std::array<double, kMax>, kMax> best{};
        std::array<std::array<int, kMax>, kMax> split{};
        for (int gap = 2; gap < d; ++gap) {
            for (int i = 0; i + gap < d; ++i) {
                const int j = i + gap;
                best[i][j] = inf;
                for (int k = i + 1; k < j; ++k) {
                    const double left = (k - i >= 2) ? best[i][k] : 0.0;
                    const double right = (j - k >= 2) ? best[k][j] : 0.0;
                    const double c = std::max({left, right, tri_cost(i, k, j)});
                    if (c < best[i][j]) {
                        best[i][j] = c;
                        split[i][j] = k;
                    }
                }
            }
        }
        if (!(best[0][d - 1] <= tol)) return false;

        std::vector<std::pair<int, int>> stack{{0, d - 1}};
        while (!stack.empty()) {
            const auto [i, j] = stack.back();
            stack.pop_back();
            if (j - i < 2) continue;
            const int k = split[i][j];
            out.push_back({link[i], link[k], link[j]});
            stack.emplace_back(i, k);
            stack.emplace_back(k, j);
        }
        return true;
    }

    bool coarsen(std::vector<char>& alive, const std::vector<char>& locked) {
        Level& cur = levels_.back();
        const std::size_t nv = verts_.size();

        std::vector<int> deg(nv + 1, 0);
        for (const auto& t : cur.tris) {
            for (int id : t.v) ++deg[id + 1];
        }
        std::vector<int> begin(nv + 1, 0);
        for (std::size_t i = 0; i < nv; ++i) begin[i + 1] = begin[i] + deg[i + 1];
        std::vector<int> star(begin[nv]);
        std::vector<int> fill(begin.begin(), begin.end() - 1);
        for (std::size_t ti = 0; ti < cur.tris.size(); ++ti) {
            for (int id : cur.tris[ti].v) star[fill[id]++] = static_cast<int>(ti);
        }

        std::vector<char> blocked(nv, 0);
        std::vector<int> removed;
        std::vector<std::vector<std::array<int, 3>>> holes;
        for (std::size_t v = 0; v < nv; ++v) {
            const int dv = begin[v + 1] - begin[v];
            if (!alive[v] || locked[v] || blocked[v] || dv < 3 || dv > kMaxRemovalDegree) continue;
            const auto link = link_cycle(static_cast<int>(v), cur.tris, star.data() + begin[v], dv);
            if (link.empty()) continue;
            std::vector<std::array<int, 3>> hole;
            if (!fill_hole(static_cast<int>(v), link, hole)) continue;
            removed.push_back(static_cast<int>(v));
            holes.push_back(std::move(hole));
            blocked[v] = 1;
            for (int u : link) blocked[u] = 1;
        }
        if (removed.empty()) return false;

        std::vector<char> gone_tri(cur.tris.size(), 0);
        cur.star_begin.assign(1, 0);
        for (int v : removed) {
            for (int k = begin[v]; k < begin[v + 1]; ++k) {
                cur.star_data.push_back(star[k]);
                gone_tri[star[k]] = 1;
            }
            cur.star_begin.push_back(static_cast<int>(cur.star_data.size()));
            alive[v] = 0;
        }

        Level next;
        for (std::size_t ti = 0; ti < cur.tris.size(); ++ti) {
            if (gone_tri[ti]) continue;
            Tri t = cur.tris[ti];
            t.link = static_cast<int>(ti);
            t.carried = true;
            t.facet = -1;
            next.tris.push_back(t);
        }
        for (std::size_t r = 0; r < removed.size(); ++r) {
            for (const auto& tv : holes[r]) {
                Tri t;
                t.v = tv;
                const Vec3& a = verts_[tv[0]];
                const Vec3 n = cross(verts_[tv[1]] - a, verts_[tv[2]] - a);
                t.m = scaled_normal(n, a, origin_);
                t.link = static_cast<int>(r);
                t.carried = false;
                next.tris.push_back(t);
            }
        }
        levels_.push_back(std::move(next));
        return true;
    }

    Kind kind_{Kind::Empty};
    double eps_{kDefaultEps};
    std::vector<HalfSpace> planes_;
    std::vector<Vec3> verts_;
    Vec3 origin_;
    std::vector<Level> levels_;
};

inline MembershipStructure build_membership(const ConvexPolytope3& poly, double eps = kDefaultEps) {
    return MembershipStructure(poly, eps);
}

inline bool query_membership(const MembershipStructure& ms, const Vec3& x, std::uint64_t* tests = nullptr) {
    return ms.contains(x, tests);
}

} // namespace msst
