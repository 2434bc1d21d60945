#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "msst/errors.hpp"

namespace msst {

/// Default relative tolerance for distance and dot-product comparisons.
inline constexpr double kDefaultEps = 1e-9;

struct Vec3 {
    double x{0.0}, y{0.0}, z{0.0};

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr bool operator==(const Vec3&) const = default;
};

/// Points of the input set live in the same coordinate space as vectors.
using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

constexpr double dist2(const Point3& a, const Point3& b) { return norm2(a - b); }
inline double dist(const Point3& a, const Point3& b) { return std::sqrt(dist2(a, b)); }

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// ---------------------------------------------------------------------------
// Balls tangent at a pole and their inversion images
// ---------------------------------------------------------------------------

/// The ball centered at `center` with `tangent` on its bounding sphere.
struct Ball {
    Point3 center;
    Point3 tangent;

    double radius() const { return dist(center, tangent); }
    double radius2() const { return dist2(center, tangent); }
};

/// Strict containment with the boundary counted as outside.
///
/// `q` is strictly inside when |center,tangent|^2 - |center,q|^2 exceeds
/// eps * |center,tangent|^2. The zero-radius ball contains nothing.
inline bool strictly_inside_ball(const Point3& q, const Ball& ball, double eps = kDefaultEps) {
    const double r2 = ball.radius2();
    return r2 - dist2(ball.center, q) > eps * r2;
}

/// Center of inversion. Images are pole + (q - pole) / |q - pole|^2.
class InversionFrame {
public:
    explicit InversionFrame(const Point3& pole) : pole_(pole) {}

    const Point3& pole() const { return pole_; }

    /// Image of `q` expressed relative to the pole.
    Vec3 invert_relative(const Point3& q, double eps = kDefaultEps) const {
        const Vec3 d = q - pole_;
        const double d2 = norm2(d);
        const double scale = std::max(norm(q), norm(pole_));
        if (d2 == 0.0 || d2 <= eps * eps * scale * scale) {
            throw PoleInversion("cannot invert a point that coincides with the pole");
        }
        return d / d2;
    }

    Point3 invert(const Point3& q, double eps = kDefaultEps) const {
        return pole_ + invert_relative(q, eps);
    }

private:
    Point3 pole_;
};

inline Point3 invert(const InversionFrame& frame, const Point3& q, double eps = kDefaultEps) {
    return frame.invert(q, eps);
}

/// Linear constraint x . normal >= offset, with x relative to the pole.
struct HalfSpace {
    static constexpr int kBox = -1;

    Vec3 normal;
    double offset{0.0};
    int source{kBox};  ///< originating ball (sorted position) or kBox

    bool from_ball() const { return source != kBox; }

    double slack(const Vec3& x) const { return dot(x, normal) - offset; }

    /// Margin a point must clear to count as strictly inside.
    ///
    /// For ball images this is the inversion-space form of the
    /// strictly_inside_ball threshold: slack * 2|q - p|^2 equals
    /// |a p|^2 - |a q|^2, and |x|^2 = 1 / |q - p|^2.
    double strict_threshold(const Vec3& x, double eps) const {
        if (from_ball()) return 0.5 * eps * norm2(normal) * norm2(x);
        return eps * std::abs(offset);
    }

    bool contains_strict(const Vec3& x, double eps) const {
        return slack(x) > strict_threshold(x, eps);
    }

    bool contains_closed(const Vec3& x, double eps) const {
        return slack(x) >= -strict_threshold(x, eps);
    }
};

/// Image of Ball(center, pole) under inversion about the pole.
inline HalfSpace ball_to_halfspace(const InversionFrame& frame, const Ball& ball, int source = 0,
                                   double eps = kDefaultEps) {
    const Vec3 c = ball.center - frame.pole();
    const double scale = std::max(norm(ball.center), norm(frame.pole()));
    if (norm2(c) == 0.0 || norm2(c) <= eps * eps * scale * scale) {
        throw DegenerateBall("ball tangent at the pole has zero radius");
    }
    return HalfSpace{c, 0.5, source};
}

// ---------------------------------------------------------------------------
// Point-set helpers
// ---------------------------------------------------------------------------

/// Diagonal of the axis-aligned bounding box.
/// Distance without the overflow of squaring huge coordinates.
inline double separation(const Point3& a, const Point3& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

inline double extent(std::span<const Point3> pts) {
    if (pts.empty()) return 0.0;
    Vec3 lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    return separation(hi, lo);
}

/// Two points closer than this are treated as the same point.
inline double duplicate_tolerance(std::span<const Point3> pts, double eps) {
    return eps * extent(pts);
}

/// Throws ValidationError on non-finite coordinates and DuplicatePoints when
/// two points coincide within eps * extent.
inline void validate_points(std::span<const Point3> pts, double eps = kDefaultEps) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!is_finite(pts[i])) {
            throw ValidationError("point " + std::to_string(i) + " has a non-finite coordinate");
        }
    }
    const double tol = duplicate_tolerance(pts, eps);
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && a < b);
    });
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = i + 1; j < idx.size() && pts[idx[j]].x - pts[idx[i]].x <= tol; ++j) {
            if (separation(pts[idx[i]], pts[idx[j]]) <= tol) {
                const auto a = std::min(idx[i], idx[j]);
                const auto b = std::max(idx[i], idx[j]);
                throw DuplicatePoints("points " + std::to_string(a) + " and " + std::to_string(b) +
                                          " coincide",
                                      a, b);
            }
        }
    }
}

/// Indices of `pts` by non-increasing squared distance from pts[pole],
/// ties by ascending index. The pole itself comes last.
inline std::vector<std::size_t> sort_by_distance(std::span<const Point3> pts, std::size_t pole,
                                                 double eps = kDefaultEps) {
    const Point3 p = pts[pole];
    const double tol = duplicate_tolerance(pts, eps);
    std::vector<double> d2(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        d2[i] = dist2(pts[i], p);
        if (i != pole && separation(pts[i], p) <= tol) {
            throw DuplicatePoints("point " + std::to_string(i) + " coincides with pole " +
                                      std::to_string(pole),
                                  std::min(i, pole), std::max(i, pole));
        }
    }
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (d2[a] != d2[b]) return d2[a] > d2[b];
        return a < b;
    });
    return order;
}

} // namespace msst
