#pragma once

// Deterministic SVG snapshots of a configuration: robots as labeled dots,
// lines of collinearity drawn through their members, the convex hull
// outlined, and arrows for moves since the previous state.

#include <mutvis/geometry.hpp>
#include <mutvis/vision.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace mutvis {

namespace detail {

inline std::string svg_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace detail

// One SVG document for `cur`. When `prev` is given, robots whose positions
// differ get an arrow from old to new.
inline std::string render_svg(const Configuration& cur, const Configuration* prev,
                              const Tolerances& tol) {
    double min_x = cur[0].position.x, max_x = min_x;
    double min_y = cur[0].position.y, max_y = min_y;
    auto widen = [&](const Point& p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    };
    for (const auto& r : cur) widen(r.position);
    if (prev) {
        for (const auto& r : *prev) widen(r.position);
    }
    const double extent = std::max({max_x - min_x, max_y - min_y, 1.0});
    const double pad = 0.12 * extent;
    const double stroke = 0.004 * extent;
    const double dot = 0.012 * extent;
    const double font = 0.035 * extent;

    // SVG y grows downward; emit flipped y coordinates.
    auto X = [&](double x) { return detail::svg_num(x); };
    auto Y = [&](double y) { return detail::svg_num(-y); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
        << detail::svg_num(min_x - pad) << ' ' << detail::svg_num(-max_y - pad) << ' '
        << detail::svg_num(max_x - min_x + 2 * pad) << ' '
        << detail::svg_num(max_y - min_y + 2 * pad) << "\" width=\"720\">\n";
    svg << "<rect x=\"" << detail::svg_num(min_x - pad) << "\" y=\""
        << detail::svg_num(-max_y - pad) << "\" width=\""
        << detail::svg_num(max_x - min_x + 2 * pad) << "\" height=\""
        << detail::svg_num(max_y - min_y + 2 * pad) << "\" fill=\"white\"/>\n";

    // Lines of collinearity, stretched a little past their extreme members.
    for (const auto& line : collinear_lines(cur, tol)) {
        const Point a = cur[line.members.front()].position;
        const Point b = cur[line.members.back()].position;
        const double len = distance(a, b);
        const double s = len > 0 ? 0.06 * extent / len : 0.0;
        const Point a2{a.x - s * (b.x - a.x), a.y - s * (b.y - a.y)};
        const Point b2{b.x + s * (b.x - a.x), b.y + s * (b.y - a.y)};
        svg << "<line class=\"colline\" x1=\"" << X(a2.x) << "\" y1=\"" << Y(a2.y)
            << "\" x2=\"" << X(b2.x) << "\" y2=\"" << Y(b2.y)
            << "\" stroke=\"#c0392b\" stroke-width=\"" << detail::svg_num(stroke)
            << "\"/>\n";
    }

    // Convex hull outline.
    {
        std::vector<Point> pts;
        pts.reserve(cur.size());
        for (const auto& r : cur) pts.push_back(r.position);
        const auto hull = convex_hull(pts, tol);
        if (hull.size() >= 3) {
            svg << "<polygon class=\"hull\" points=\"";
            for (std::size_t i = 0; i < hull.size(); ++i) {
                if (i) svg << ' ';
                svg << X(hull[i].x) << ',' << Y(hull[i].y);
            }
            svg << "\" fill=\"none\" stroke=\"#2980b9\" stroke-dasharray=\""
                << detail::svg_num(3 * stroke) << ' ' << detail::svg_num(3 * stroke)
                << "\" stroke-width=\"" << detail::svg_num(stroke) << "\"/>\n";
        }
    }

    // Arrows for moves since the previous state.
    if (prev) {
        for (std::size_t i = 0; i < cur.size() && i < prev->size(); ++i) {
            const Point from = (*prev)[i].position;
            const Point to = cur[i].position;
            if (exactly_equal(from, to)) continue;
            svg << "<line class=\"moved\" x1=\"" << X(from.x) << "\" y1=\""
                << Y(from.y) << "\" x2=\"" << X(to.x) << "\" y2=\"" << Y(to.y)
                << "\" stroke=\"#27ae60\" stroke-width=\"" << detail::svg_num(stroke)
                << "\"/>\n";
            svg << "<circle cx=\"" << X(from.x) << "\" cy=\"" << Y(from.y)
                << "\" r=\"" << detail::svg_num(0.5 * dot)
                << "\" fill=\"none\" stroke=\"#27ae60\" stroke-width=\""
                << detail::svg_num(0.5 * stroke) << "\"/>\n";
        }
    }

    // Robots with id:bit labels.
    for (const auto& r : cur) {
        svg << "<circle class=\"robot\" cx=\"" << X(r.position.x) << "\" cy=\""
            << Y(r.position.y) << "\" r=\"" << detail::svg_num(dot)
            << "\" fill=\"#2c3e50\"/>\n";
        svg << "<text x=\"" << detail::svg_num(r.position.x + 1.4 * dot) << "\" y=\""
            << detail::svg_num(-r.position.y - 1.4 * dot) << "\" font-size=\""
            << detail::svg_num(font) << "\" font-family=\"sans-serif\" fill=\"#555\">"
            << r.id << ':' << r.bit << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace mutvis
