#pragma once

// Hand-listed benchmark configurations. These are written out longhand, on
// purpose: the library's generator is checked against them, so they must
// not be produced by the code under test.

#include <mutvis/vision.hpp>

namespace fixtures {

// n robots on the x axis at x = 0..n-1.
inline mutvis::Configuration line(int n) {
    mutvis::Configuration c;
    for (int i = 0; i < n; ++i) c.push_back({i, {double(i), 0.0}, 0});
    return c;
}

// k x k unit grid, row-major ids: id = k*y + x.
inline mutvis::Configuration grid(int k) {
    mutvis::Configuration c;
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) c.push_back({k * y + x, {double(x), double(y)}, 0});
    return c;
}

// Center plus four axis-aligned arms of three robots each.
// ids: 0 center; 1-3 east; 4-6 north; 7-9 west; 10-12 south.
inline mutvis::Configuration star43() {
    mutvis::Configuration c;
    c.push_back({0, {0, 0}, 0});
    int id = 1;
    const double dirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (auto& d : dirs)
        for (int r = 1; r <= 3; ++r) c.push_back({id++, {d[0] * r, d[1] * r}, 0});
    return c;
}

// Four lines closing into a rectangle of junctions:
//   bottom y=0 (ids 0-3), right x=3 (2,4,5,8), top y=3 (6-9), left x=1 (1,7,10,11).
// Junctions: (1,0)=1, (3,0)=2, (1,3)=7, (3,3)=8.
inline mutvis::Configuration cycle4() {
    return {
        {0, {-1, 0}, 0}, {1, {1, 0}, 0}, {2, {3, 0}, 0},  {3, {5, 0}, 0},
        {4, {3, -2}, 0}, {5, {3, 5}, 0},
        {6, {-1, 3}, 0}, {7, {1, 3}, 0}, {8, {3, 3}, 0},  {9, {5, 3}, 0},
        {10, {1, -2}, 0}, {11, {1, 5}, 0},
    };
}

} // namespace fixtures
