#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "msst/geometry.hpp"

namespace msst {

/// Relative tolerance used while constructing polytopes. Vertex
/// classification against a cutting plane treats |signed distance| below
/// kGeomTol * (|v|_inf + plane distance) as lying on the plane.
inline constexpr double kGeomTol = 1e-12;

/// One facet of a polytope: its supporting constraint and where its vertex
/// ring (counter-clockwise seen from outside) sits in ConvexPolytope3::rings.
struct Facet {
    HalfSpace plane;
    int begin{0};
    int size{0};
};

/// Bounded convex polytope: the cube [-w, w]^3 (pole-relative) intersected
/// with a list of halfspaces.
struct ConvexPolytope3 {
    std::vector<Vec3> vertices;
    std::vector<Facet> facets;
    std::vector<int> rings;
    bool empty{true};
    double box_halfwidth{0.0};

    std::size_t facet_count() const { return empty ? 0 : facets.size(); }

    std::size_t ball_facet_count() const {
        if (empty) return 0;
        return static_cast<std::size_t>(std::count_if(
            facets.begin(), facets.end(), [](const Facet& f) { return f.plane.from_ball(); }));
    }

    std::span<const int> ring(std::size_t f) const {
        return std::span<const int>(rings).subspan(facets[f].begin, facets[f].size);
    }
};

inline std::size_t facet_count(const ConvexPolytope3& poly) { return poly.facet_count(); }

enum class Strictness { Strict, Closed };

/// Reference membership test: a linear scan over every constraint.
inline bool contains_linear(std::span<const HalfSpace> halfspaces, const Vec3& x, Strictness mode,
                            double eps = kDefaultEps) {
    for (const auto& h : halfspaces) {
        const bool ok = mode == Strictness::Strict ? h.contains_strict(x, eps) : h.contains_closed(x, eps);
        if (!ok) return false;
    }
    return true;
}

/// The six faces of [-w, w]^3 written as x . normal >= offset.
inline std::array<HalfSpace, 6> box_halfspaces(double w) {
    return {HalfSpace{{1, 0, 0}, -w, HalfSpace::kBox},  HalfSpace{{-1, 0, 0}, -w, HalfSpace::kBox},
            HalfSpace{{0, 1, 0}, -w, HalfSpace::kBox},  HalfSpace{{0, -1, 0}, -w, HalfSpace::kBox},
            HalfSpace{{0, 0, 1}, -w, HalfSpace::kBox},  HalfSpace{{0, 0, -1}, -w, HalfSpace::kBox}};
}

inline double polytope_volume(const ConvexPolytope3& poly) {
    double six_v = 0.0;
    for (std::size_t f = 0; f < poly.facets.size(); ++f) {
        const auto ring = poly.ring(f);
        const Vec3& a = poly.vertices[ring[0]];
        for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
            six_v += dot(a, cross(poly.vertices[ring[i]], poly.vertices[ring[i + 1]]));
        }
    }
    return six_v / 6.0;
}

namespace detail {

inline double max_abs(const Vec3& v) {
    return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

/// Orders coplanar vertex ids counter-clockwise around `outward`.
inline void sort_ccw(std::vector<int>& ids, const std::vector<Vec3>& verts, const Vec3& outward) {
    if (ids.size() < 3) return;
    Vec3 c{};
    for (int id : ids) c += verts[id];
    c = c / static_cast<double>(ids.size());
    const Vec3 w = outward / norm(outward);
    const Vec3 helper = std::abs(w.x) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 u = cross(helper, w);
    u = u / norm(u);
    const Vec3 v = cross(w, u);
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(ids.size());
    for (int id : ids) {
        const Vec3 d = verts[id] - c;
        keyed.emplace_back(std::atan2(dot(d, v), dot(d, u)), id);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = keyed[i].second;
}

/// Incremental clipper. Rings are stored flat and rebuilt by every clip;
/// scratch buffers are reused between polytopes.
class Clipper {
public:
    Clipper() = default;
    explicit Clipper(double w) { reset(w); }

    /// Restarts from the cube [-w, w]^3.
    void reset(double w) {
        w_ = w;
        empty_ = false;
        verts_.clear();
        faces_.clear();
        ring_data_.clear();
        for (int i = 0; i < 8; ++i) {
            verts_.push_back({(i & 1) ? w : -w, (i & 2) ? w : -w, (i & 4) ? w : -w});
        }
        // Faces of the cube, counter-clockwise from outside, in the order of
        // box_halfspaces(): x = -w, x = +w, y = -w, y = +w, z = -w, z = +w.
        static constexpr int kCubeFaces[6][4] = {
            {0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
        const auto box = box_halfspaces(w);
        for (int f = 0; f < 6; ++f) {
            const int begin = static_cast<int>(ring_data_.size());
            ring_data_.insert(ring_data_.end(), kCubeFaces[f], kCubeFaces[f] + 4);
            faces_.push_back({box[f], begin, 4});
        }
    }

    /// Continues from an existing clip result.
    void load(const ConvexPolytope3& poly) {
        w_ = poly.box_halfwidth;
        empty_ = poly.empty;
        verts_ = poly.vertices;
        faces_ = poly.facets;
        ring_data_ = poly.rings;
    }

    bool empty() const { return empty_; }
    std::size_t face_count() const { return empty_ ? 0 : faces_.size(); }

    /// Clips by one halfspace. Returns false once the polytope is empty.
    bool clip(const HalfSpace& h) {
        if (empty_) return false;
        const double cn = norm(h.normal);
        const double plane_dist = std::abs(h.offset) / cn;
        const std::size_t nv = verts_.size();
        sd_.resize(nv);
        cls_.resize(nv);
        bool any_in = false, any_out = false;
        for (std::size_t i = 0; i < nv; ++i) {
            const double s = h.slack(verts_[i]) / cn;
            const double tol = kGeomTol * (max_abs(verts_[i]) + plane_dist);
            sd_[i] = s;
            if (s > tol) {
                cls_[i] = 1;
                any_in = true;
            } else if (s < -tol) {
                cls_[i] = -1;
                any_out = true;
            } else {
                cls_[i] = 0;
            }
        }
        if (!any_out) return true;
        if (!any_in) {
            empty_ = true;
            return false;
        }

        cut_cache_.clear();
        cap_edges_.clear();
        new_ring_data_.clear();
        new_faces_.clear();
        for (const auto& f : faces_) {
            const int begin = static_cast<int>(new_ring_data_.size());
            for (int k = 0; k < f.size; ++k) {
                const int a = ring_data_[f.begin + k];
                const int b = ring_data_[f.begin + (k + 1 == f.size ? 0 : k + 1)];
                if (cls_[a] != -1) new_ring_data_.push_back(a);
                if (cls_[a] * cls_[b] == -1) new_ring_data_.push_back(cut(a, b));
            }
            const int size = static_cast<int>(new_ring_data_.size()) - begin;
            if (size < 3) {
                new_ring_data_.resize(begin);
                continue;
            }
            new_faces_.push_back({f.plane, begin, size});
            // Consecutive on-plane vertices a -> b bound the cap, which
            // traverses that edge as b -> a.
            for (int k = 0; k < size; ++k) {
                const int a = new_ring_data_[begin + k];
                const int b = new_ring_data_[begin + (k + 1 == size ? 0 : k + 1)];
                if (cls_[a] == 0 && cls_[b] == 0) cap_edges_.emplace_back(b, a);
            }
        }
        faces_.swap(new_faces_);
        ring_data_.swap(new_ring_data_);

        if (!chain_cap()) sort_cap(h);
        if (cap_ids_.size() >= 3) merge_close_cap_vertices(h);
        if (cap_ids_.size() >= 3) {
            const int begin = static_cast<int>(ring_data_.size());
            ring_data_.insert(ring_data_.end(), cap_ids_.begin(), cap_ids_.end());
            faces_.push_back({h, begin, static_cast<int>(cap_ids_.size())});
        }
        compact();
        if (faces_.size() < 4) {
            empty_ = true;
            return false;
        }
        return true;
    }

    ConvexPolytope3 result() const {
        ConvexPolytope3 out;
        out.box_halfwidth = w_;
        out.empty = empty_;
        if (empty_) return out;
        out.vertices = verts_;
        out.facets.assign(faces_.begin(), faces_.end());
        out.rings = ring_data_;
        if (polytope_volume(out) <= 0.0) {
            out.empty = true;
            out.vertices.clear();
            out.facets.clear();
            out.rings.clear();
        }
        return out;
    }

private:
    int cut(int a, int b) {
        const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
                                  static_cast<std::uint32_t>(std::max(a, b));
        for (const auto& [k, id] : cut_cache_) {
            if (k == key) return id;
        }
        const double t = sd_[a] / (sd_[a] - sd_[b]);
        const Vec3 p = verts_[a] + (verts_[b] - verts_[a]) * t;
        const int id = static_cast<int>(verts_.size());
        verts_.push_back(p);
        sd_.push_back(0.0);
        cls_.push_back(0);
        cut_cache_.emplace_back(key, id);
        return id;
    }

    /// Orders the cap ring by following its edges. Fails on anything that is
    /// not a single simple cycle.
    bool chain_cap() {
        cap_ids_.clear();
        const std::size_t m = cap_edges_.size();
        if (m < 3) return false;
        int cur = cap_edges_[0].first;
        for (std::size_t step = 0; step < m; ++step) {
            cap_ids_.push_back(cur);
            int next = -1;
            for (const auto& [from, to] : cap_edges_) {
                if (from == cur) {
                    if (next >= 0) return false;
                    next = to;
                }
            }
            if (next < 0) return false;
            cur = next;
        }
        if (cur != cap_ids_.front()) return false;
        // A single cycle through m edges visits m distinct vertices.
        seen_.resize(verts_.size());
        ++stamp_;
        for (int id : cap_ids_) {
            if (seen_[id] == stamp_) return false;
            seen_[id] = stamp_;
        }
        return true;
    }

    /// Fallback: every on-plane vertex still in use, sorted by angle.
    void sort_cap(const HalfSpace& h) {
        cap_ids_.clear();
        for (int id : ring_data_) {
            if (cls_[id] == 0) cap_ids_.push_back(id);
        }
        std::sort(cap_ids_.begin(), cap_ids_.end());
        cap_ids_.erase(std::unique(cap_ids_.begin(), cap_ids_.end()), cap_ids_.end());
        sort_ccw(cap_ids_, verts_, -h.normal);
    }

    /// Consecutive cap vertices closer than the tolerance are merged.
    void merge_close_cap_vertices(const HalfSpace& h) {
        const double plane_dist = std::abs(h.offset) / norm(h.normal);
        auto close = [&](int a, int b) {
            const double tol = kGeomTol * (max_abs(verts_[a]) + plane_dist);
            return dist2(verts_[a], verts_[b]) <= tol * tol;
        };
        remap_.clear();
        kept_.clear();
        for (int id : cap_ids_) {
            if (!kept_.empty() && close(id, kept_.back())) {
                remap_.emplace_back(id, kept_.back());
                continue;
            }
            kept_.push_back(id);
        }
        while (kept_.size() >= 2 && close(kept_.back(), kept_.front())) {
            remap_.emplace_back(kept_.back(), kept_.front());
            kept_.pop_back();
        }
        cap_ids_.swap(kept_);
        if (remap_.empty()) return;

        // Rewrite rings and drop the repeated entries this creates.
        new_ring_data_.clear();
        new_faces_.clear();
        for (const auto& f : faces_) {
            const int begin = static_cast<int>(new_ring_data_.size());
            for (int k = 0; k < f.size; ++k) {
                int id = ring_data_[f.begin + k];
                for (const auto& [from, to] : remap_) {
                    if (id == from) id = to;
                }
                if (new_ring_data_.size() > static_cast<std::size_t>(begin) && new_ring_data_.back() == id) {
                    continue;
                }
                new_ring_data_.push_back(id);
            }
            while (new_ring_data_.size() - begin >= 2 && new_ring_data_.back() == new_ring_data_[begin]) {
                new_ring_data_.pop_back();
            }
            const int size = static_cast<int>(new_ring_data_.size()) - begin;
            if (size >= 3) {
                new_faces_.push_back({f.plane, begin, size});
            } else {
                new_ring_data_.resize(begin);
            }
        }
        faces_.swap(new_faces_);
        ring_data_.swap(new_ring_data_);
    }

    /// Drops unreferenced vertices and renumbers the rings.
    void compact() {
        remap_index_.assign(verts_.size(), -1);
        for (int id : ring_data_) remap_index_[id] = 0;
        int next = 0;
        new_verts_.clear();
        for (std::size_t i = 0; i < verts_.size(); ++i) {
            if (remap_index_[i] == 0) {
                remap_index_[i] = next++;
                new_verts_.push_back(verts_[i]);
            }
        }
        for (int& id : ring_data_) id = remap_index_[id];
        verts_.swap(new_verts_);
    }

    double w_{0.0};
    bool empty_{true};
    std::vector<Vec3> verts_;
    std::vector<Facet> faces_;
    std::vector<int> ring_data_;

    // scratch
    std::vector<double> sd_;
    std::vector<signed char> cls_;
    std::vector<std::pair<std::uint64_t, int>> cut_cache_;
    std::vector<std::pair<int, int>> cap_edges_;
    std::vector<int> cap_ids_;
    std::vector<int> kept_;
    std::vector<int> new_ring_data_;
    std::vector<Facet> new_faces_;
    std::vector<std::pair<int, int>> remap_;
    std::vector<int> remap_index_;
    std::vector<Vec3> new_verts_;
    std::vector<std::uint32_t> seen_;
    std::uint32_t stamp_{0};
};

} // namespace detail

/// Intersection of [-w, w]^3 with every halfspace in `halfspaces`.
///
/// Emptiness is decided during clipping: a cut that leaves no vertex
/// strictly inside the new constraint empties the polytope, so
/// lower-dimensional intersections come back empty.
inline ConvexPolytope3 clip_box(std::span<const HalfSpace> halfspaces, double box_halfwidth) {
    thread_local detail::Clipper clipper;
    clipper.reset(box_halfwidth);
    for (const auto& h : halfspaces) {
        if (!clipper.clip(h)) break;
    }
    return clipper.result();
}

/// `base` further clipped by `halfspaces`; base must come from clip_box or
/// this function.
inline ConvexPolytope3 clip_polytope(const ConvexPolytope3& base, std::span<const HalfSpace> halfspaces) {
    if (base.empty) return base;
    thread_local detail::Clipper clipper;
    clipper.load(base);
    for (const auto& h : halfspaces) {
        if (!clipper.clip(h)) break;
    }
    return clipper.result();
}

/// ASCII OFF: "OFF", "V F 0", vertex lines, then "k i1 ... ik" per facet.
inline void write_off(const ConvexPolytope3& poly, std::ostream& out) {
    out << "OFF\n";
    if (poly.empty) {
        out << "0 0 0\n";
        return;
    }
    out << poly.vertices.size() << ' ' << poly.facets.size() << " 0\n";
    char buf[96];
    for (const auto& v : poly.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (std::size_t f = 0; f < poly.facets.size(); ++f) {
        const auto ring = poly.ring(f);
        out << ring.size();
        for (int id : ring) out << ' ' << id;
        out << '\n';
    }
}

inline void export_off(const ConvexPolytope3& poly, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_off(poly, out);
}

} // namespace msst
