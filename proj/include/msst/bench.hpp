#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "msst/instance.hpp"
#include "msst/solver.hpp"
#include "msst/stats.hpp"

namespace msst {

struct BenchRecord {
    std::size_t n{0};
    std::uint64_t seed{0};
    std::string mode{"tree"};
    unsigned workers{1};

    // Phase times in ms. With several workers the per-pole phases are summed
    // over workers and can exceed total_ms.
    double sort_ms{0.0};
    double build_ms{0.0};
    double query_ms{0.0};
    double scan_ms{0.0};
    double total_ms{0.0};
    double oracle_ms{std::numeric_limits<double>::quiet_NaN()};

    std::uint64_t queries{0};
    std::uint64_t node_visits{0};
    std::uint64_t membership_tests{0};
    std::uint64_t plane_tests{0};
    std::uint64_t polytopes_built{0};
    std::uint64_t facets_built{0};
    std::uint64_t max_tree_facets{0};
    std::uint64_t max_node_visits{0};
    std::uint64_t max_plane_tests_per_node{0};
    int max_membership_depth{0};
    double msst_cost{0.0};
};

struct BenchOptions {
    Distribution dist{Distribution::Cube};
    unsigned workers{1};
    double eps{kDefaultEps};
    bool compare_oracle{false};
};

/// Times one tree-mode solve (matrix plus pair scan) on generate(n, dist, seed).
inline BenchRecord run_bench_case(std::size_t n, std::uint64_t seed, const BenchOptions& opts) {
    const Instance inst = generate(n, opts.dist, seed);
    BenchRecord rec;
    rec.n = n;
    rec.seed = seed;
    rec.workers = detail::resolve_workers(opts.workers);

    PassStats stats;
    SolveOptions so{opts.eps, Mode::Tree, opts.workers};
    Stopwatch total;
    const auto F = compute_matrix(inst.points, so, &stats);
    Stopwatch scan;
    const auto res = solve_msst(inst.points, F);
    rec.scan_ms = scan.elapsed_ms();
    rec.total_ms = total.elapsed_ms();

    rec.sort_ms = stats.sort_ms;
    rec.build_ms = stats.build_ms;
    rec.query_ms = stats.query_ms;
    rec.queries = stats.queries;
    rec.node_visits = stats.node_visits;
    rec.membership_tests = stats.membership_tests;
    rec.plane_tests = stats.plane_tests;
    rec.polytopes_built = stats.polytopes_built;
    rec.facets_built = stats.facets_built;
    rec.max_tree_facets = stats.max_tree_facets;
    rec.max_node_visits = stats.max_node_visits;
    rec.max_plane_tests_per_node = stats.max_plane_tests_per_node;
    rec.max_membership_depth = stats.max_membership_depth;
    rec.msst_cost = res.msst_cost;

    if (opts.compare_oracle) {
        so.mode = Mode::BruteForce;
        Stopwatch oracle;
        const auto G = compute_matrix(inst.points, so);
        const auto ores = solve_msst(inst.points, G);
        rec.oracle_ms = oracle.elapsed_ms();
        if (std::abs(ores.msst_cost - res.msst_cost) > 1e-9 * std::max(1.0, std::abs(ores.msst_cost))) {
            throw Error("bench: tree and bruteforce costs disagree at n = " + std::to_string(n) +
                        ", seed = " + std::to_string(seed));
        }
    }
    return rec;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Exponent k in t ~ n^k through two measurements.
inline double loglog_slope(double n1, double t1, double n2, double t2) {
    return std::log(t2 / t1) / std::log(n2 / n1);
}

struct BenchSummary {
    std::size_t n{0};
    std::size_t runs{0};
    double median_ms{0.0};
    double median_oracle_ms{std::numeric_limits<double>::quiet_NaN()};
    double slope{std::numeric_limits<double>::quiet_NaN()};  ///< against the previous size
};

/// Per-n medians of total_ms, in increasing n.
inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
    std::map<std::size_t, std::vector<const BenchRecord*>> by_n;
    for (const auto& r : records) by_n[r.n].push_back(&r);
    std::vector<BenchSummary> out;
    for (const auto& [n, rs] : by_n) {
        std::vector<double> t, o;
        for (const auto* r : rs) {
            t.push_back(r->total_ms);
            if (!std::isnan(r->oracle_ms)) o.push_back(r->oracle_ms);
        }
        BenchSummary s;
        s.n = n;
        s.runs = rs.size();
        s.median_ms = median(t);
        s.median_oracle_ms = median(o);
        if (!out.empty()) {
            s.slope = loglog_slope(static_cast<double>(out.back().n), out.back().median_ms, static_cast<double>(n),
                                   s.median_ms);
        }
        out.push_back(s);
    }
    return out;
}

inline std::vector<BenchRecord> run_bench(const std::vector<std::size_t>& sizes, std::size_t seeds,
                                          const BenchOptions& opts) {
    std::vector<BenchRecord> records;
    for (std::size_t n : sizes) {
        for (std::uint64_t s = 0; s < seeds; ++s) records.push_back(run_bench_case(n, s, opts));
    }
    return records;
}

inline std::string records_to_csv(const std::vector<BenchRecord>& records) {
    std::string out =
        "n,seed,mode,workers,sort_ms,build_ms,query_ms,scan_ms,total_ms,oracle_ms,queries,node_visits,"
        "membership_tests,plane_tests,polytopes_built,facets_built,max_tree_facets,max_node_visits,"
        "max_plane_tests_per_node,max_membership_depth,msst_cost\n";
    for (const auto& r : records) {
        out += std::to_string(r.n) + "," + std::to_string(r.seed) + "," + r.mode + "," + std::to_string(r.workers) +
               "," + format_real(r.sort_ms) + "," + format_real(r.build_ms) + "," + format_real(r.query_ms) + "," +
               format_real(r.scan_ms) + "," + format_real(r.total_ms) + "," +
               (std::isnan(r.oracle_ms) ? std::string() : format_real(r.oracle_ms)) + "," +
               std::to_string(r.queries) + "," + std::to_string(r.node_visits) + "," +
               std::to_string(r.membership_tests) + "," + std::to_string(r.plane_tests) + "," +
               std::to_string(r.polytopes_built) + "," + std::to_string(r.facets_built) + "," +
               std::to_string(r.max_tree_facets) + "," + std::to_string(r.max_node_visits) + "," +
               std::to_string(r.max_plane_tests_per_node) + "," + std::to_string(r.max_membership_depth) + "," +
               format_real(r.msst_cost) + "\n";
    }
    return out;
}

inline std::string summary_to_csv(const std::vector<BenchSummary>& summary) {
    std::string out = "n,runs,median_ms,median_oracle_ms,speedup,slope\n";
    for (const auto& s : summary) {
        const bool has_oracle = !std::isnan(s.median_oracle_ms);
        out += std::to_string(s.n) + "," + std::to_string(s.runs) + "," + format_real(s.median_ms) + "," +
               (has_oracle ? format_real(s.median_oracle_ms) : std::string()) + "," +
               (has_oracle ? format_real(s.median_oracle_ms / s.median_ms) : std::string()) + "," +
               (std::isnan(s.slope) ? std::string() : format_real(s.slope)) + "\n";
    }
    return out;
}

} // namespace msst
