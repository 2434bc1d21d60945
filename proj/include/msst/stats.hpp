#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>

namespace msst {

/// Instrumentation gathered by the per-pole passes. Each worker fills its
/// own copy; copies are merged after the pass.
struct PassStats {
    std::uint64_t poles{0};
    std::uint64_t queries{0};
    std::uint64_t node_visits{0};
    std::uint64_t membership_tests{0};  ///< polytope/leaf membership decisions
    std::uint64_t plane_tests{0};       ///< elementary plane-side evaluations
    std::uint64_t polytopes_built{0};
    std::uint64_t facets_built{0};
    std::uint64_t max_node_visits{0};          ///< per query
    std::uint64_t max_plane_tests_per_node{0};  ///< per visited node
    std::uint64_t max_tree_facets{0};          ///< per pole
    int max_membership_depth{0};

    double sort_ms{0.0};
    double build_ms{0.0};
    double query_ms{0.0};

    void merge(const PassStats& o) {
        poles += o.poles;
        queries += o.queries;
        node_visits += o.node_visits;
        membership_tests += o.membership_tests;
        plane_tests += o.plane_tests;
        polytopes_built += o.polytopes_built;
        facets_built += o.facets_built;
        max_node_visits = std::max(max_node_visits, o.max_node_visits);
        max_plane_tests_per_node = std::max(max_plane_tests_per_node, o.max_plane_tests_per_node);
        max_tree_facets = std::max(max_tree_facets, o.max_tree_facets);
        max_membership_depth = std::max(max_membership_depth, o.max_membership_depth);
        sort_ms += o.sort_ms;
        build_ms += o.build_ms;
        query_ms += o.query_ms;
    }
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace msst
