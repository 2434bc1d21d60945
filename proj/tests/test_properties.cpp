#include <gtest/gtest.h>

#include "msst/solver.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/suites.hpp"

using namespace msst;
using msst::testing::Gen;

TEST(Properties, InversionInvolution) {
    const auto r = msst::testing::involution_suite(71, 10000);
    EXPECT_TRUE(r.ok(10000)) << r.failures << " failures, first: " << r.first_failure;
}

TEST(Properties, BallHalfspaceCorrespondence) {
    const auto r = msst::testing::correspondence_suite(72, 10000);
    EXPECT_TRUE(r.ok(10000)) << r.failures << " failures, first: " << r.first_failure;
}

TEST(Properties, LabelsLieOnClosedPoleSide) {
    Gen g(73);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pts = g.cube_points(2 + g.index(60));
        const auto F = compute_matrix(pts);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            for (std::size_t q = 0; q < pts.size(); ++q) {
                if (p == q) continue;
                const auto& f = pts[F.at(p, q)];
                // q is not strictly inside Ball(f, p).
                EXPECT_GE(dist2(f, pts[q]), dist2(f, pts[p]) * (1 - kDefaultEps) * (1 - 1e-12));
            }
        }
    }
}

TEST(Properties, MatrixInvariantUnderTranslationAndScale) {
    Gen g(74);
    for (int trial = 0; trial < 10; ++trial) {
        const auto pts = g.cube_points(40);
        const Vec3 shift = g.in_cube(-100, 100);
        const double s = g.log_uniform(1e-3, 1e3);
        std::vector<Point3> moved;
        for (const auto& p : pts) moved.push_back(p * s + shift);
        const auto a = compute_matrix(pts);
        const auto b = compute_matrix(moved);
        EXPECT_EQ(a, b) << "trial " << trial << " scale " << s;
        EXPECT_TRUE(msst::testing::rel_close(solve_msst(pts, a).msst_cost * s, solve_msst(moved, b).msst_cost, 1e-9));
    }
}

TEST(Properties, PermutingInputPermutesPoles) {
    Gen g(75);
    for (int trial = 0; trial < 10; ++trial) {
        auto pts = g.cube_points(30);
        const auto before = solve_msst(pts);
        std::vector<Point3> rev(pts.rbegin(), pts.rend());
        const auto after = solve_msst(rev);
        EXPECT_TRUE(msst::testing::rel_close(before.msst_cost, after.msst_cost, 1e-12));
        const std::size_t n = pts.size();
        const std::size_t ax = n - 1 - after.pole_x, ay = n - 1 - after.pole_y;
        EXPECT_EQ(std::min(ax, ay), before.pole_x);
        EXPECT_EQ(std::max(ax, ay), before.pole_y);
    }
}

TEST(Properties, SortIsPermutationWithNonIncreasingDistance) {
    Gen g(76);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = g.cube_points(2 + g.index(40));
        const std::size_t p = g.index(pts.size());
        const auto order = sort_by_distance(pts, p);
        std::vector<char> seen(pts.size(), 0);
        for (auto i : order) seen[i] += 1;
        EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](char c) { return c == 1; }));
        for (std::size_t i = 1; i < order.size(); ++i) {
            EXPECT_GE(dist2(pts[order[i - 1]], pts[p]), dist2(pts[order[i]], pts[p]));
        }
        EXPECT_EQ(order.back(), p);
    }
}
