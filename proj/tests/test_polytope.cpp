#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "msst/polytope.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace msst;
using msst::testing::Gen;

namespace {

std::vector<msst::testing::Plane> planes_of(std::span<const HalfSpace> hs, double w) {
    std::vector<msst::testing::Plane> out;
    for (const auto& b : box_halfspaces(w)) out.push_back({b.normal, b.offset});
    for (const auto& h : hs) out.push_back({h.normal, h.offset});
    return out;
}

/// Halfspaces of the balls Ball(q, p) for points q in the unit cube and p at
/// a corner, so that the intersection is large.
std::vector<HalfSpace> corner_pole_halfspaces(Gen& g, std::size_t m) {
    const Point3 p{0, 0, 0};
    const InversionFrame frame(p);
    std::vector<HalfSpace> hs;
    for (std::size_t i = 0; i < m; ++i) {
        hs.push_back(ball_to_halfspace(frame, Ball{g.in_cube(0.05, 1.0), p}, static_cast<int>(i)));
    }
    return hs;
}

void expect_well_formed(const ConvexPolytope3& poly, std::span<const HalfSpace> hs) {
    ASSERT_FALSE(poly.empty);
    const double w = poly.box_halfwidth;
    const double tol = 1e-9 * w;
    for (const auto& v : poly.vertices) {
        EXPECT_LE(detail::max_abs(v), w * (1 + 1e-12));
        for (const auto& h : hs) EXPECT_GE(h.slack(v) / norm(h.normal), -tol);
    }
    std::set<int> sources;
    for (std::size_t f = 0; f < poly.facets.size(); ++f) {
        const auto& plane = poly.facets[f].plane;
        if (plane.from_ball()) {
            EXPECT_TRUE(sources.insert(plane.source).second) << "source " << plane.source << " repeated";
        }
        const auto ring = poly.ring(f);
        ASSERT_GE(ring.size(), 3u);
        const Vec3 outward = -plane.normal / norm(plane.normal);
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const Vec3& a = poly.vertices[ring[i]];
            const Vec3& b = poly.vertices[ring[(i + 1) % ring.size()]];
            const Vec3& c = poly.vertices[ring[(i + 2) % ring.size()]];
            EXPECT_NEAR(plane.slack(a) / norm(plane.normal), 0.0, tol);
            EXPECT_GE(dot(cross(b - a, c - b), outward), -tol * w);
        }
    }
}

} // namespace

TEST(ClipBox, BoxOnly) {
    const auto poly = clip_box({}, 1.0);
    ASSERT_FALSE(poly.empty);
    EXPECT_EQ(poly.vertices.size(), 8u);
    EXPECT_EQ(facet_count(poly), 6u);
    EXPECT_NEAR(polytope_volume(poly), 8.0, 1e-12);
    expect_well_formed(poly, {});
}

TEST(ClipBox, ContradictoryConstraintsAreEmpty) {
    const std::vector<HalfSpace> hs{{{1, 0, 0}, 0.5, 0}, {{-1, 0, 0}, 0.5, 1}};
    const auto poly = clip_box(hs, 10.0);
    EXPECT_TRUE(poly.empty);
    EXPECT_EQ(facet_count(poly), 0u);
}

TEST(ClipBox, TouchingConstraintsAreEmpty) {
    // x >= 0.5 and x <= 0.5 meet in a plane: lower-dimensional, so empty.
    const std::vector<HalfSpace> hs{{{1, 0, 0}, 0.5, 0}, {{-1, 0, 0}, -0.5, 1}};
    EXPECT_TRUE(clip_box(hs, 10.0).empty);
}

TEST(ClipBox, ConstraintOutsideBoxIsEmpty) {
    const std::vector<HalfSpace> hs{{{1, 0, 0}, 0.5, 0}};
    EXPECT_TRUE(clip_box(hs, 0.25).empty);
}

TEST(ClipBox, SingleCut) {
    const std::vector<HalfSpace> hs{{{1, 1, 0}, 0.5, 0}};
    const auto poly = clip_box(hs, 1.0);
    EXPECT_LE(facet_count(poly), 7u);
    expect_well_formed(poly, hs);
}

TEST(ClipBox, MatchesTripleEnumeration) {
    Gen g(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto hs = trial % 2 ? corner_pole_halfspaces(g, 20) : g.cone_halfspaces(20, g.direction(), 0.6);
        const double w = 6.0;
        const auto poly = clip_box(hs, w);
        const auto expected = msst::testing::triple_enumeration_vertices(planes_of(hs, w), 1e-9 * w);
        if (poly.empty) {
            EXPECT_TRUE(expected.empty()) << "trial " << trial;
            continue;
        }
        expect_well_formed(poly, hs);
        EXPECT_TRUE(msst::testing::same_point_sets(poly.vertices, expected, 1e-7 * w))
            << "trial " << trial << ": " << poly.vertices.size() << " vs " << expected.size() << " vertices";
    }
}

TEST(ClipBox, EmptyIffTripleEnumerationFindsNothing) {
    Gen g(12);
    int empties = 0;
    for (int trial = 0; trial < 30; ++trial) {
        // Centers spread over all directions: usually empty.
        const auto hs = g.cone_halfspaces(6, {0, 0, 1}, 3.2);
        const double w = 4.0;
        const auto poly = clip_box(hs, w);
        const auto expected = msst::testing::triple_enumeration_vertices(planes_of(hs, w), 1e-9 * w);
        EXPECT_EQ(poly.empty, expected.size() < 4) << "trial " << trial;
        empties += poly.empty ? 1 : 0;
    }
    EXPECT_GT(empties, 0);
}

TEST(FacetCount, LinearInConstraints) {
    Gen g(13);
    for (std::size_t m : {16u, 64u, 256u}) {
        for (int seed = 0; seed < 5; ++seed) {
            const auto hs = g.cone_halfspaces(m, g.direction(), 0.8);
            const auto poly = clip_box(hs, 8.0);
            EXPECT_FALSE(poly.empty);
            EXPECT_LE(facet_count(poly), m + 6);
            EXPECT_LE(poly.ball_facet_count(), m);
        }
    }
}

TEST(FacetCount, PolytopeFromSphereTangentPlanesUsesManyConstraints) {
    // Planes tangent to a sphere from outside: every plane is a facet.
    Gen g(14);
    std::vector<HalfSpace> hs;
    const Vec3 center{0, 0, 5};
    for (int i = 0; i < 64; ++i) {
        const Vec3 u = g.direction_near({0, 0, -1}, 0.7);
        // (x - center) . (-u) >= -1 keeps the side containing the center;
        // rewrite as x . c >= 1/2 with c scaled accordingly.
        const Vec3 n = -u;
        const double b = dot(n, center) - 1.0;
        hs.push_back({n * (0.5 / b), 0.5, i});
    }
    const auto poly = clip_box(hs, 10.0);
    ASSERT_FALSE(poly.empty);
    EXPECT_LE(facet_count(poly), 64u + 6u);
    // Each tangent point lies strictly inside every other constraint.
    EXPECT_EQ(poly.ball_facet_count(), 64u);
    expect_well_formed(poly, hs);
}

TEST(ContainsLinear, Examples) {
    EXPECT_TRUE(contains_linear({}, {3, 4, 5}, Strictness::Strict));
    EXPECT_TRUE(contains_linear({}, {3, 4, 5}, Strictness::Closed));
    const std::vector<HalfSpace> hs{{{1, 0, 0}, 0.5, 0}};
    EXPECT_FALSE(contains_linear(hs, {0.5, 0, 0}, Strictness::Strict));
    EXPECT_TRUE(contains_linear(hs, {0.5, 0, 0}, Strictness::Closed));
    EXPECT_TRUE(contains_linear(hs, {0.6, 0, 0}, Strictness::Strict));
    EXPECT_FALSE(contains_linear(hs, {0.4, 0, 0}, Strictness::Closed));
}

TEST(ContainsLinear, AgreesWithBallConjunctionInProblemSpace) {
    Gen g(15);
    for (int trial = 0; trial < 50; ++trial) {
        const Point3 p = g.in_cube();
        const InversionFrame frame(p);
        std::vector<Ball> balls;
        std::vector<HalfSpace> hs;
        for (int i = 0; i < 5; ++i) {
            balls.push_back({p + g.direction() * g.uniform(0.5, 1.5), p});
            hs.push_back(ball_to_halfspace(frame, balls.back(), i));
        }
        for (int k = 0; k < 200; ++k) {
            const Point3 q = p + g.direction() * g.uniform(0.01, 3.0);
            bool near_boundary = false;
            bool inside_all = true;
            for (const auto& b : balls) {
                near_boundary = near_boundary || std::abs(b.radius2() - dist2(q, b.center)) < 1e-6 * b.radius2();
                inside_all = inside_all && strictly_inside_ball(q, b);
            }
            if (near_boundary) continue;
            EXPECT_EQ(contains_linear(hs, frame.invert_relative(q), Strictness::Strict), inside_all);
        }
    }
}

TEST(ContainsLinear, AddingConstraintNeverGrowsAcceptedSet) {
    Gen g(16);
    for (int trial = 0; trial < 20; ++trial) {
        auto hs = g.cone_halfspaces(8, {0, 0, 1}, 1.0);
        std::vector<Vec3> samples;
        for (int k = 0; k < 500; ++k) samples.push_back(g.in_cube(-3, 3));
        std::vector<char> before;
        for (const auto& x : samples) before.push_back(contains_linear(hs, x, Strictness::Strict));
        hs.push_back({g.direction() * g.uniform(0.3, 3.0), 0.5, 99});
        for (std::size_t k = 0; k < samples.size(); ++k) {
            if (!before[k]) {
                EXPECT_FALSE(contains_linear(hs, samples[k], Strictness::Strict));
            }
        }
    }
}

TEST(ClipBox, VerticesSatisfyAllConstraintsAndFacetsAreDistinct) {
    Gen g(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto hs = corner_pole_halfspaces(g, 40);
        const auto poly = clip_box(hs, 2.0 / 0.05);
        if (!poly.empty) expect_well_formed(poly, hs);
    }
}

TEST(ExportOff, CubeFormat) {
    const auto poly = clip_box({}, 1.0);
    std::ostringstream out;
    write_off(poly, out);
    std::istringstream in(out.str());
    std::string magic;
    std::size_t nv = 0, nf = 0, ne = 1;
    in >> magic >> nv >> nf >> ne;
    EXPECT_EQ(magic, "OFF");
    EXPECT_EQ(nv, 8u);
    EXPECT_EQ(nf, 6u);
    EXPECT_EQ(ne, 0u);
    for (std::size_t i = 0; i < nv; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        EXPECT_EQ(std::abs(x), 1.0);
        EXPECT_EQ(std::abs(y), 1.0);
        EXPECT_EQ(std::abs(z), 1.0);
    }
    for (std::size_t f = 0; f < nf; ++f) {
        std::size_t k = 0;
        in >> k;
        EXPECT_EQ(k, 4u);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t id = 99;
            in >> id;
            EXPECT_LT(id, nv);
        }
    }
    EXPECT_TRUE(static_cast<bool>(in));
}

TEST(ExportOff, EmptyPolytope) {
    std::ostringstream out;
    write_off(ConvexPolytope3{}, out);
    EXPECT_EQ(out.str(), "OFF\n0 0 0\n");
}

TEST(ExportOff, WritesFile) {
    const std::string path = ::testing::TempDir() + "msst_cube.off";
    export_off(clip_box({}, 2.0), path);
    std::ifstream in(path);
    std::string magic;
    in >> magic;
    EXPECT_EQ(magic, "OFF");
}
