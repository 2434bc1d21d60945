#include <gtest/gtest.h>

#include <cmath>

#include "msst/membership.hpp"
#include "msst/polytope.hpp"
#include "support/generators.hpp"

using namespace msst;
using msst::testing::Gen;

namespace {

// Elementary tests per query may not exceed kC * log2(m) + kC.
constexpr double kC = 16.0;

/// Planes tangent to the unit sphere around (0, 0, 3), directions within
/// `angle` of -z, written as ball-derived constraints: every one is a facet.
std::vector<HalfSpace> tangent_halfspaces(Gen& g, std::size_t m, double angle) {
    std::vector<HalfSpace> hs;
    const Vec3 center{0, 0, 3};
    for (std::size_t i = 0; i < m; ++i) {
        const Vec3 n = -g.direction_near({0, 0, -1}, angle);
        const double b = dot(n, center) - 1.0;
        hs.push_back({n * (0.5 / b), 0.5, static_cast<int>(i)});
    }
    return hs;
}

std::vector<HalfSpace> with_box(std::vector<HalfSpace> hs, double w) {
    for (const auto& b : box_halfspaces(w)) hs.push_back(b);
    return hs;
}

/// Distance from x to the nearest constraint plane.
double boundary_distance(std::span<const HalfSpace> hs, const Vec3& x) {
    double d = INFINITY;
    for (const auto& h : hs) d = std::min(d, std::abs(h.slack(x)) / norm(h.normal));
    return d;
}

struct Agreement {
    int checked{0};
    int inside{0};
    std::uint64_t max_tests{0};
};

Agreement check_against_linear(const MembershipStructure& ms, std::span<const HalfSpace> all, Gen& g,
                               const Vec3& lo, const Vec3& hi, int samples) {
    Agreement a;
    for (int k = 0; k < samples; ++k) {
        const Vec3 x{g.uniform(lo.x, hi.x), g.uniform(lo.y, hi.y), g.uniform(lo.z, hi.z)};
        if (boundary_distance(all, x) <= 1e-7 * (1.0 + norm(x))) continue;
        std::uint64_t tests = 0;
        const bool got = ms.contains(x, &tests);
        const bool want = contains_linear(all, x, Strictness::Strict);
        EXPECT_EQ(got, want) << "x = " << x.x << ", " << x.y << ", " << x.z;
        a.checked += 1;
        a.inside += want ? 1 : 0;
        a.max_tests = std::max(a.max_tests, tests);
    }
    return a;
}

} // namespace

TEST(Membership, EmptyPolytopeRejectsEverything) {
    const std::vector<HalfSpace> hs{{{1, 0, 0}, 0.5, 0}, {{-1, 0, 0}, 0.5, 1}};
    const auto ms = build_membership(clip_box(hs, 10.0));
    EXPECT_TRUE(ms.is_empty());
    for (const Vec3 x : {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{100, 100, 100}}) {
        EXPECT_FALSE(query_membership(ms, x));
    }
}

TEST(Membership, Cube) {
    const double w = 3.0;
    const auto ms = build_membership(clip_box({}, w));
    EXPECT_TRUE(query_membership(ms, {0, 0, 0}));
    EXPECT_FALSE(query_membership(ms, {2 * w, 0, 0}));
    EXPECT_FALSE(query_membership(ms, {0, -2 * w, 0}));
    EXPECT_TRUE(query_membership(ms, {w * 0.99, -w * 0.99, w * 0.99}));
}

TEST(Membership, BoundaryIsOutside) {
    const std::vector<HalfSpace> hs{{{1, 0, 0}, 0.5, 0}};
    const auto ms = build_membership(clip_box(hs, 4.0));
    EXPECT_FALSE(query_membership(ms, {0.5, 0.1, 0.2}));
    EXPECT_TRUE(query_membership(ms, {0.6, 0.1, 0.2}));
}

TEST(Membership, Random64HalfspacePolytopeAgreesWithLinearScan) {
    Gen g(21);
    const double w = 8.0;
    const auto hs = tangent_halfspaces(g, 64, 0.9);
    const auto poly = clip_box(hs, w);
    ASSERT_FALSE(poly.empty);
    const auto ms = build_membership(poly);
    EXPECT_TRUE(ms.is_hierarchical());
    const auto all = with_box(hs, w);

    // Half the samples in the polytope's bounding box, half in the whole box.
    Vec3 lo{w, w, w}, hi{-w, -w, -w};
    for (const auto& v : poly.vertices) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    const auto near = check_against_linear(ms, all, g, lo, hi, 5000);
    const auto far = check_against_linear(ms, all, g, {-w, -w, -w}, {w, w, w}, 5000);
    EXPECT_GT(near.checked + far.checked, 9900);
    EXPECT_GT(near.inside, 100);
    const double bound = kC * std::log2(64.0) + kC;
    EXPECT_LE(static_cast<double>(std::max(near.max_tests, far.max_tests)), bound);
}

TEST(Membership, PolytopesFromBallHalfspacesAgreeWithLinearScan) {
    Gen g(22);
    for (int trial = 0; trial < 20; ++trial) {
        const Point3 p{0, 0, 0};
        const InversionFrame frame(p);
        std::vector<HalfSpace> hs;
        const std::size_t m = 16 + 16 * static_cast<std::size_t>(trial);
        for (std::size_t i = 0; i < m; ++i) {
            hs.push_back(ball_to_halfspace(frame, Ball{g.in_cube(0.05, 1.0), p}, static_cast<int>(i)));
        }
        const double w = 2.0 / 0.05;
        const auto poly = clip_box(hs, w);
        if (poly.empty) continue;
        const auto ms = build_membership(poly);
        const auto all = with_box(hs, w);
        Vec3 lo{w, w, w}, hi{-w, -w, -w};
        for (const auto& v : poly.vertices) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
        check_against_linear(ms, all, g, lo, hi, 500);
    }
}

TEST(Membership, DepthAndTestsAreLogarithmic) {
    Gen g(23);
    for (std::size_t m : {8u, 32u, 128u, 512u, 2048u, 4096u}) {
        const double w = 8.0;
        const auto hs = tangent_halfspaces(g, m, 1.0);
        const auto poly = clip_box(hs, w);
        ASSERT_FALSE(poly.empty);
        const auto ms = build_membership(poly);
        const double lg = std::log2(static_cast<double>(m));
        EXPECT_LE(ms.depth(), kC * lg + kC) << "m = " << m;

        Vec3 lo{w, w, w}, hi{-w, -w, -w};
        for (const auto& v : poly.vertices) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
        const auto all = with_box(hs, w);
        const auto a = check_against_linear(ms, all, g, lo, hi, m >= 2048 ? 300 : 1000);
        EXPECT_LE(static_cast<double>(a.max_tests), kC * lg + kC) << "m = " << m;
    }
}
