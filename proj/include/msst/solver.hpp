#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msst/exclusion_tree.hpp"
#include "msst/geometry.hpp"
#include "msst/stats.hpp"

namespace msst {

enum class Mode { Tree, BruteForce };

inline const char* to_string(Mode m) { return m == Mode::Tree ? "tree" : "bruteforce"; }

struct SolveOptions {
    double eps{kDefaultEps};
    Mode mode{Mode::Tree};
    unsigned workers{0};  ///< 0 = hardware concurrency
};

/// Entry (p, q) is the index of the q-farthest point from p: the point of
/// p's closed side of the (p, q) bisector that is farthest from p.
class FarthestMatrix {
public:
    FarthestMatrix() = default;
    explicit FarthestMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {
        for (std::size_t i = 0; i < n; ++i) entries_[i * n + i] = static_cast<std::uint32_t>(i);
    }

    std::size_t size() const { return n_; }
    std::uint32_t at(std::size_t p, std::size_t q) const { return entries_[p * n_ + q]; }
    void set(std::size_t p, std::size_t q, std::uint32_t v) { entries_[p * n_ + q] = v; }

    std::span<std::uint32_t> row(std::size_t p) { return {entries_.data() + p * n_, n_}; }
    std::span<const std::uint32_t> row(std::size_t p) const { return {entries_.data() + p * n_, n_}; }

    bool operator==(const FarthestMatrix&) const = default;

private:
    std::size_t n_{0};
    std::vector<std::uint32_t> entries_;
};

struct DipoleCost {
    double msst_cost;
    double two_center_cost;
    double r_x;
    double r_y;
};

using Edge = std::pair<std::size_t, std::size_t>;

struct DipoleResult {
    std::size_t pole_x{0};
    std::size_t pole_y{0};
    double r_x{0.0};
    double r_y{0.0};
    double msst_cost{0.0};
    double two_center_cost{0.0};
    std::vector<Edge> edges;
};

namespace detail {

/// Runs fn(i, worker) for i in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i, w);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

inline unsigned resolve_workers(unsigned workers) {
    return workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
}

} // namespace detail

/// q-farthest labels for every q != p via the exclusion tree of p. The
/// returned row has n entries; row[p] = p.
inline std::vector<std::uint32_t> label_row(std::span<const Point3> pts, std::size_t p,
                                            double eps = kDefaultEps, PassStats* stats = nullptr) {
    const ExclusionTree tree(pts, p, TreeOptions{eps, false}, stats);
    std::vector<std::uint32_t> row(pts.size());
    Stopwatch clock;
    for (std::size_t q = 0; q < pts.size(); ++q) {
        if (q == p) {
            row[q] = static_cast<std::uint32_t>(p);
            continue;
        }
        row[q] = static_cast<std::uint32_t>(tree.order()[tree.first_excluded(pts[q], stats)]);
    }
    if (stats) {
        stats->query_ms += clock.elapsed_ms();
        stats->poles += 1;
    }
    return row;
}

/// Direct scan: the farthest point x from p with q not strictly inside
/// Ball(x, p); equal distances resolve to the smaller index.
inline std::size_t brute_force_label(std::span<const Point3> pts, std::size_t p, std::size_t q,
                                     double eps = kDefaultEps) {
    std::size_t best = p;
    double best_d2 = 0.0;
    for (std::size_t x = 0; x < pts.size(); ++x) {
        if (strictly_inside_ball(pts[q], Ball{pts[x], pts[p]}, eps)) continue;
        const double d2 = dist2(pts[x], pts[p]);
        if (d2 > best_d2) {
            best_d2 = d2;
            best = x;
        }
    }
    return best;
}

inline FarthestMatrix compute_matrix(std::span<const Point3> pts, const SolveOptions& opts = {},
                                     PassStats* stats = nullptr) {
    if (pts.size() < 2) throw ValidationError("need at least two points");
    validate_points(pts, opts.eps);
    const std::size_t n = pts.size();
    FarthestMatrix F(n);
    const unsigned workers = detail::resolve_workers(opts.workers);
    std::vector<PassStats> local(workers);
    detail::parallel_for(n, workers, [&](std::size_t p, unsigned w) {
        auto out = F.row(p);
        if (opts.mode == Mode::Tree) {
            const auto row = label_row(pts, p, opts.eps, &local[w]);
            std::copy(row.begin(), row.end(), out.begin());
        } else {
            for (std::size_t q = 0; q < n; ++q) {
                if (q != p) out[q] = static_cast<std::uint32_t>(brute_force_label(pts, p, q, opts.eps));
            }
        }
    });
    if (stats) {
        for (const auto& s : local) stats->merge(s);
    }
    return F;
}

inline DipoleCost dipole_cost(std::span<const Point3> pts, const FarthestMatrix& F, std::size_t x,
                              std::size_t y) {
    const double r_x = dist(pts[x], pts[F.at(x, y)]);
    const double r_y = dist(pts[y], pts[F.at(y, x)]);
    const double r = std::max(r_x, r_y);
    return {dist(pts[x], pts[y]) + r, r, r_x, r_y};
}

/// Edge (x, y) plus every other point attached to its nearer pole; points on
/// the bisector go to the smaller pole index.
inline std::vector<Edge> dipolar_edges(std::span<const Point3> pts, std::size_t x, std::size_t y) {
    const std::size_t lo = std::min(x, y), hi = std::max(x, y);
    std::vector<Edge> edges;
    edges.reserve(pts.size() - 1);
    edges.emplace_back(lo, hi);
    for (std::size_t z = 0; z < pts.size(); ++z) {
        if (z == lo || z == hi) continue;
        const double dl = dist2(pts[z], pts[lo]);
        const double dh = dist2(pts[z], pts[hi]);
        edges.emplace_back(dl <= dh ? lo : hi, z);
    }
    return edges;
}

namespace detail {

inline DipoleResult make_result(std::span<const Point3> pts, std::size_t x, std::size_t y, double r_x,
                                double r_y) {
    DipoleResult res;
    res.pole_x = x;
    res.pole_y = y;
    res.r_x = r_x;
    res.r_y = r_y;
    res.two_center_cost = std::max(r_x, r_y);
    res.msst_cost = dist(pts[x], pts[y]) + res.two_center_cost;
    res.edges = dipolar_edges(pts, x, y);
    return res;
}

enum class Objective { Msst, TwoCenter };

inline DipoleResult scan_pairs(std::span<const Point3> pts, const FarthestMatrix& F, Objective obj) {
    const std::size_t n = pts.size();
    std::size_t bx = 0, by = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            const auto c = dipole_cost(pts, F, x, y);
            const double v = obj == Objective::Msst ? c.msst_cost : c.two_center_cost;
            if (v < best) {
                best = v;
                bx = x;
                by = y;
            }
        }
    }
    const auto c = dipole_cost(pts, F, bx, by);
    return make_result(pts, bx, by, c.r_x, c.r_y);
}

} // namespace detail

/// Minimum of |xy| + max(r_x, r_y) over all pairs, read from the matrix.
/// Equal costs resolve to the lexicographically smallest pair.
inline DipoleResult solve_msst(std::span<const Point3> pts, const FarthestMatrix& F) {
    return detail::scan_pairs(pts, F, detail::Objective::Msst);
}

inline DipoleResult solve_msst(std::span<const Point3> pts, const SolveOptions& opts = {},
                               PassStats* stats = nullptr) {
    const auto F = compute_matrix(pts, opts, stats);
    return solve_msst(pts, F);
}

/// Discrete 2-center from the same matrix: minimum of max(r_x, r_y).
inline DipoleResult solve_two_center(std::span<const Point3> pts, const FarthestMatrix& F) {
    return detail::scan_pairs(pts, F, detail::Objective::TwoCenter);
}

struct OracleResult {
    DipoleResult msst;
    DipoleResult two_center;
};

/// O(n^3) baseline for both objectives. For every pair the covering radius
/// is max over z of min(|zx|, |zy|), which does not depend on how bisector
/// points are assigned; r_x and r_y are taken over closed sides.
inline OracleResult brute_force_dipoles(std::span<const Point3> pts) {
    const std::size_t n = pts.size();
    if (n < 2) throw ValidationError("need at least two points");
    double best_msst = std::numeric_limits<double>::infinity();
    double best_tc = std::numeric_limits<double>::infinity();
    std::size_t mx = 0, my = 1, tx = 0, ty = 1;
    double m_rx = 0, m_ry = 0, t_rx = 0, t_ry = 0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
            double r_x = 0.0, r_y = 0.0;
            for (std::size_t z = 0; z < n; ++z) {
                const double dx = dist(pts[z], pts[x]);
                const double dy = dist(pts[z], pts[y]);
                if (dx <= dy) r_x = std::max(r_x, dx);
                if (dy <= dx) r_y = std::max(r_y, dy);
            }
            const double r = std::max(r_x, r_y);
            const double msst = dist(pts[x], pts[y]) + r;
            if (msst < best_msst) {
                best_msst = msst;
                mx = x;
                my = y;
                m_rx = r_x;
                m_ry = r_y;
            }
            if (r < best_tc) {
                best_tc = r;
                tx = x;
                ty = y;
                t_rx = r_x;
                t_ry = r_y;
            }
        }
    }
    return {detail::make_result(pts, mx, my, m_rx, m_ry), detail::make_result(pts, tx, ty, t_rx, t_ry)};
}

inline DipoleResult brute_force_msst(std::span<const Point3> pts) { return brute_force_dipoles(pts).msst; }

inline DipoleResult brute_force_two_center(std::span<const Point3> pts) {
    return brute_force_dipoles(pts).two_center;
}

} // namespace msst
