#pragma once

#include <mutvis/geometry.hpp>

#include <random>
#include <vector>

namespace testutil {

inline std::vector<mutvis::Point> random_points(std::mt19937_64& rng, int n,
                                                double lo = -10.0, double hi = 10.0,
                                                double min_sep = 1e-3) {
    std::uniform_real_distribution<double> coord(lo, hi);
    std::vector<mutvis::Point> pts;
    while (static_cast<int>(pts.size()) < n) {
        mutvis::Point cand{coord(rng), coord(rng)};
        bool ok = true;
        for (const auto& p : pts) {
            if (mutvis::distance(p, cand) < min_sep) { ok = false; break; }
        }
        if (ok) pts.push_back(cand);
    }
    return pts;
}

inline bool near(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

inline bool near_point(mutvis::Point a, mutvis::Point b, double tol = 1e-12) {
    return near(a.x, b.x, tol) && near(a.y, b.y, tol);
}

} // namespace testutil
