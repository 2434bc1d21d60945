#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msst/geometry.hpp"
#include "msst/membership.hpp"
#include "msst/polytope.hpp"
#include "msst/stats.hpp"

namespace msst {

struct TreeOptions {
    double eps{kDefaultEps};
    /// Also build polytopes for right children and the root. They are never
    /// queried; this exists for auditing facet counts.
    bool build_all_polytopes{false};
    /// Keep the clipped polytopes after their membership structures are
    /// built. node_polytope() rebuilds them on demand otherwise.
    bool keep_polytopes{false};
};

/// Binary tree over the balls Ball(q_i, pole), i in non-increasing distance
/// order, answering "first ball that does not strictly contain q".
///
/// Leaves follow the sorted order; the last leaf is the zero-radius ball at
/// the pole, which excludes every other point. Internal nodes cover
/// contiguous ranges [lo, hi) and split at the middle, so there is no
/// padding when n is not a power of two. Left children carry the clipped
/// inversion-space polytope of their range plus a membership structure.
class ExclusionTree {
public:
    ExclusionTree(std::span<const Point3> pts, std::size_t pole, TreeOptions opts = {},
                  PassStats* stats = nullptr)
        : pole_index_(pole), pole_(pts[pole]), eps_(opts.eps), frame_(pts[pole]) {
        Stopwatch sort_clock;
        order_ = sort_by_distance(pts, pole, eps_);
        const std::size_t n = order_.size();
        sorted_.reserve(n);
        for (std::size_t idx : order_) sorted_.push_back(pts[idx]);
        if (stats) stats->sort_ms += sort_clock.elapsed_ms();

        Stopwatch build_clock;
        halfspaces_.reserve(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            halfspaces_.push_back(ball_to_halfspace(frame_, Ball{sorted_[j], pole_}, static_cast<int>(j), eps_));
        }
        // Queries invert to norm 1/|q - p| <= 1/|q_{n-2} - p|.
        box_halfwidth_ = n >= 2 ? 2.0 / dist(sorted_[n - 2], pole_) : 1.0;

        nodes_.reserve(2 * n);
        keep_polytopes_ = opts.keep_polytopes;
        build_node(0, static_cast<int>(n), false, opts.build_all_polytopes);
        if (stats) {
            stats->build_ms += build_clock.elapsed_ms();
            stats->polytopes_built += membership_.size();
            stats->facets_built += stored_facets_;
            stats->max_tree_facets = std::max<std::uint64_t>(stats->max_tree_facets, stored_facets_);
            for (const auto& ms : membership_) {
                stats->max_membership_depth = std::max(stats->max_membership_depth, ms.depth());
            }
        }
    }

    std::size_t size() const { return order_.size(); }
    std::size_t pole_index() const { return pole_index_; }
    const Point3& pole() const { return pole_; }
    double box_halfwidth() const { return box_halfwidth_; }
    double eps() const { return eps_; }

    /// Input indices in sorted position order; the pole is last.
    const std::vector<std::size_t>& order() const { return order_; }
    std::size_t sentinel_position() const { return order_.size() - 1; }

    const HalfSpace& leaf_halfspace(std::size_t pos) const { return halfspaces_.at(pos); }
    std::span<const HalfSpace> halfspaces() const { return halfspaces_; }

    std::size_t internal_node_count() const {
        std::size_t count = 0;
        for (const auto& node : nodes_) count += node.is_leaf() ? 0 : 1;
        return count;
    }

    /// Facets summed over every stored polytope.
    std::size_t stored_facets() const { return stored_facets_; }
    std::size_t stored_polytopes() const { return membership_.size(); }

    /// Longest root-to-leaf path, counted in internal nodes.
    int height() const { return height_from(0); }

    /// Smallest sorted position j with q outside Ball(q_j, pole) under the
    /// boundary-excluded convention.
    std::size_t first_excluded(const Point3& q, PassStats* stats = nullptr) const {
        const Vec3 x = inverted_query(q);
        std::uint64_t visits = 0;
        int node = 0;
        while (!nodes_[node].is_leaf()) {
            ++visits;
            const Node& left = nodes_[nodes_[node].left];
            std::uint64_t tests = 0;
            bool inside;
            if (left.is_leaf()) {
                tests = 1;
                inside = halfspaces_[left.lo].contains_strict(x, eps_);
            } else {
                inside = membership_[left.poly].contains(x, &tests);
            }
            if (stats) {
                stats->plane_tests += tests;
                stats->membership_tests += 1;
                stats->max_plane_tests_per_node = std::max(stats->max_plane_tests_per_node, tests);
            }
            node = inside ? nodes_[node].right : nodes_[node].left;
        }
        if (stats) {
            stats->queries += 1;
            stats->node_visits += visits;
            stats->max_node_visits = std::max(stats->max_node_visits, visits);
        }
        return static_cast<std::size_t>(nodes_[node].lo);
    }

    /// Reference scan in problem space: first position whose ball does not
    /// strictly contain q.
    std::size_t first_excluded_linear(const Point3& q) const {
        check_not_pole(q);
        const std::size_t last = sentinel_position();
        for (std::size_t j = 0; j < last; ++j) {
            if (!strictly_inside_ball(q, Ball{sorted_[j], pole_}, eps_)) return j;
        }
        return last;
    }

    /// Polytope of the node reached by following `path` ('L'/'R') from the
    /// root. Built on demand when the node does not store one.
    ConvexPolytope3 node_polytope(std::string_view path) const {
        int node = 0;
        for (char c : path) {
            if (nodes_[node].is_leaf()) throw ValidationError("node path runs past a leaf");
            if (c == 'L' || c == 'l') {
                node = nodes_[node].left;
            } else if (c == 'R' || c == 'r') {
                node = nodes_[node].right;
            } else {
                throw ValidationError(std::string("invalid node path character '") + c + "'");
            }
        }
        const Node& nd = nodes_[node];
        if (nd.poly >= 0 && keep_polytopes_) return polytopes_[nd.poly];
        return range_polytope(nd.lo, nd.hi);
    }

    void export_polytope_off(std::string_view path, const std::string& file) const {
        export_off(node_polytope(path), file);
    }

private:
    struct Node {
        int lo{0}, hi{0};
        int left{-1}, right{-1};
        int poly{-1};
        bool is_leaf() const { return hi - lo == 1; }
    };

    void check_not_pole(const Point3& q) const {
        const double scale = std::max(norm(q), norm(pole_));
        const double d2 = dist2(q, pole_);
        if (d2 == 0.0 || d2 <= eps_ * eps_ * scale * scale) {
            throw PoleQuery("query point coincides with the tree's pole");
        }
    }

    Vec3 inverted_query(const Point3& q) const {
        check_not_pole(q);
        return frame_.invert_relative(q, eps_);
    }

    std::span<const HalfSpace> range_halfspaces(int lo, int hi) const {
        // The sentinel position contributes no constraint.
        const int end = std::min(hi, static_cast<int>(halfspaces_.size()));
        if (end <= lo) return {};
        return std::span<const HalfSpace>(halfspaces_).subspan(lo, end - lo);
    }

    ConvexPolytope3 range_polytope(int lo, int hi) const {
        return clip_box(range_halfspaces(lo, hi), box_halfwidth_);
    }

    /// Builds the subtree over [lo, hi). A left child's polytope is handed
    /// back through `poly_out` so the parent only clips by its right half.
    int build_node(int lo, int hi, bool is_left, bool all, ConvexPolytope3* poly_out = nullptr) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back({lo, hi, -1, -1, -1});
        if (hi - lo == 1) return id;
        const int mid = lo + (hi - lo) / 2;
        ConvexPolytope3 left_poly;
        const int left = build_node(lo, mid, true, all, &left_poly);
        if (is_left || all) {
            auto poly = mid - lo >= 2 ? clip_polytope(left_poly, range_halfspaces(mid, hi))
                                      : range_polytope(lo, hi);
            stored_facets_ += poly.facet_count();
            membership_.emplace_back(poly, eps_);
            nodes_[id].poly = static_cast<int>(membership_.size()) - 1;
            if (keep_polytopes_) polytopes_.push_back(poly);
            if (poly_out) *poly_out = std::move(poly);
        }
        const int right = build_node(mid, hi, false, all);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    int height_from(int node) const {
        if (nodes_[node].is_leaf()) return 0;
        return 1 + std::max(height_from(nodes_[node].left), height_from(nodes_[node].right));
    }

    std::size_t pole_index_;
    Point3 pole_;
    double eps_;
    InversionFrame frame_;
    std::vector<std::size_t> order_;
    std::vector<Point3> sorted_;
    std::vector<HalfSpace> halfspaces_;
    double box_halfwidth_{1.0};
    std::vector<Node> nodes_;
    std::vector<ConvexPolytope3> polytopes_;
    std::vector<MembershipStructure> membership_;
    std::size_t stored_facets_{0};
    bool keep_polytopes_{false};
};

} // namespace msst
