#pragma once

// Planar geometry kernel: points, tolerance-aware predicates, angular gap
// analysis around an observer, convex hulls, and similarity frames.
//
// All coordinates are double precision. Collinearity is decided with a
// relative tolerance (eps_col) so the test is invariant under uniform
// scaling; exact arithmetic is not an option because bisector directions
// introduce square roots.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace mutvis {

inline constexpr double k_pi = std::numbers::pi;
inline constexpr double k_two_pi = 2.0 * std::numbers::pi;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Unit-length heading. Kept separate from Point so signatures say what they
// mean.
struct Direction {
    double dx = 0.0;
    double dy = 0.0;
};

struct Tolerances {
    double eps_col = 1e-9;   // relative collinearity tolerance
    double eps_dist = 1e-12; // absolute distance comparison slack
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline bool exactly_equal(Point a, Point b) { return a.x == b.x && a.y == b.y; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

inline Point advance(Point p, Direction d, double len) {
    return {p.x + len * d.dx, p.y + len * d.dy};
}

// Twice the signed area of triangle (a, b, c). Positive when c lies to the
// left of the directed line a -> b.
inline double orientation(Point a, Point b, Point c) {
    return cross(b - a, c - a);
}

// Relative collinearity test: |orientation| <= eps_col * |b-a| * |c-a|.
inline bool is_collinear(Point a, Point b, Point c, const Tolerances& tol) {
    return std::abs(orientation(a, b, c)) <=
           tol.eps_col * distance(a, b) * distance(a, c);
}

// True when m lies strictly inside segment (a, b). The three points must be
// pairwise distinct and collinear under tol; anything else is a contract
// violation.
inline bool is_between(Point a, Point m, Point b, const Tolerances& tol) {
    if (distance(a, m) <= tol.eps_dist || distance(b, m) <= tol.eps_dist ||
        distance(a, b) <= tol.eps_dist) {
        throw std::invalid_argument("is_between: endpoints must be distinct");
    }
    if (!is_collinear(a, m, b, tol)) {
        throw std::invalid_argument("is_between: points are not collinear");
    }
    const double along = distance(a, b);
    return dot(m - a, b - a) > tol.eps_dist * along &&
           dot(m - b, a - b) > tol.eps_dist * along;
}

// Distance from p to the infinite line through a and b.
inline double perp_distance(Point p, Point a, Point b) {
    const double len = distance(a, b);
    if (!(len > 0.0)) {
        throw std::invalid_argument("perp_distance: line is degenerate");
    }
    return std::abs(orientation(a, b, p)) / len;
}

// Angle of the vector from `from` to `to`, normalized to [0, 2*pi).
inline double direction_angle(Point from, Point to) {
    double a = std::atan2(to.y - from.y, to.x - from.x);
    if (a < 0.0) a += k_two_pi;
    if (a >= k_two_pi) a = 0.0;
    return a;
}

// One angular gap between consecutive occupied directions around an
// observer, counter-clockwise from `start`.
struct AngularGap {
    double start = 0.0; // direction in [0, 2*pi)
    double angle = 0.0; // gap width in (0, 2*pi]
};

// Sorted counter-clockwise gap decomposition of the directions from center
// to each target. Duplicate directions collapse, so the number of gaps
// equals the number of distinct directions; the widths sum to 2*pi.
inline std::vector<AngularGap> angular_gaps(Point center,
                                            std::span<const Point> targets) {
    if (targets.empty()) {
        throw std::invalid_argument("angular_gaps: no targets");
    }
    std::vector<double> dirs;
    dirs.reserve(targets.size());
    for (const Point& t : targets) {
        if (distance(center, t) == 0.0) {
            throw std::invalid_argument("angular_gaps: target coincides with center");
        }
        dirs.push_back(direction_angle(center, t));
    }
    std::sort(dirs.begin(), dirs.end());
    constexpr double angle_dup = 1e-12;
    std::vector<double> distinct;
    for (double a : dirs) {
        if (distinct.empty() || a - distinct.back() > angle_dup) distinct.push_back(a);
    }
    // Wrap-around duplicate: last direction within angle_dup of first + 2*pi.
    if (distinct.size() > 1 &&
        (distinct.front() + k_two_pi) - distinct.back() <= angle_dup) {
        distinct.pop_back();
    }
    std::vector<AngularGap> gaps;
    gaps.reserve(distinct.size());
    if (distinct.size() == 1) {
        gaps.push_back({distinct.front(), k_two_pi});
        return gaps;
    }
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        gaps.push_back({distinct[i], distinct[i + 1] - distinct[i]});
    }
    gaps.push_back({distinct.back(),
                    k_two_pi - distinct.back() + distinct.front()});
    return gaps;
}

// Unit vector splitting a gap in half (counter-clockwise from its start).
inline Direction bisector_direction(const AngularGap& gap) {
    if (!(gap.angle > 0.0) || !(gap.angle < k_two_pi)) {
        throw std::invalid_argument("bisector_direction: gap angle out of range");
    }
    double a = gap.start + 0.5 * gap.angle;
    if (a >= k_two_pi) a -= k_two_pi;
    return {std::cos(a), std::sin(a)};
}

inline Direction rotate(Direction d, double by) {
    const double c = std::cos(by), s = std::sin(by);
    return {d.dx * c - d.dy * s, d.dx * s + d.dy * c};
}

// Strict convex hull vertices in counter-clockwise order starting from the
// lexicographically smallest point. Points interior to hull edges (collinear
// under tol) are excluded. Degenerate inputs collapse: one point gives one
// vertex, a fully collinear set gives its two extremes.
inline std::vector<Point> convex_hull(std::span<const Point> pts,
                                      const Tolerances& tol = {}) {
    if (pts.empty()) {
        throw std::invalid_argument("convex_hull: no points");
    }
    std::vector<Point> p(pts.begin(), pts.end());
    std::sort(p.begin(), p.end(), [](Point a, Point b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    p.erase(std::unique(p.begin(), p.end(), exactly_equal), p.end());
    const std::size_t n = p.size();
    if (n <= 2) return p;

    // Monotone chain; a turn counts as straight (and pops) when it is
    // collinear under the relative tolerance.
    auto non_left = [&](Point a, Point b, Point c) {
        const double o = orientation(a, b, c);
        return o <= tol.eps_col * distance(a, b) * distance(a, c);
    };
    std::vector<Point> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && non_left(hull[k - 2], hull[k - 1], p[i])) --k;
        hull[k++] = p[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) { // upper
        while (k >= t && non_left(hull[k - 2], hull[k - 1], p[i])) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    if (hull.size() == 2 && exactly_equal(hull[0], hull[1])) hull.pop_back();
    return hull;
}

// Orientation-preserving-or-reflecting similarity: p -> scale * R(theta) * F * p + shift,
// with F the reflection about the x axis when reflect == -1.
struct Similarity {
    double scale = 1.0;
    double cos_t = 1.0;
    double sin_t = 0.0;
    double reflect = 1.0; // +1 or -1
    Point shift{0.0, 0.0};

    static Similarity identity() { return {}; }

    static Similarity make(double scale, double theta, bool reflected, Point shift) {
        if (!(scale > 0.0)) {
            throw std::invalid_argument("Similarity: scale must be positive");
        }
        return {scale, std::cos(theta), std::sin(theta), reflected ? -1.0 : 1.0, shift};
    }

    Point apply(Point p) const {
        const double fx = p.x, fy = reflect * p.y;
        return {scale * (cos_t * fx - sin_t * fy) + shift.x,
                scale * (sin_t * fx + cos_t * fy) + shift.y};
    }

    Point invert(Point q) const {
        if (!(scale > 0.0)) {
            throw std::invalid_argument("Similarity: scale must be positive");
        }
        const double ux = (q.x - shift.x) / scale, uy = (q.y - shift.y) / scale;
        const double rx = cos_t * ux + sin_t * uy;
        const double ry = -sin_t * ux + cos_t * uy;
        return {rx, reflect * ry};
    }
};

} // namespace mutvis
