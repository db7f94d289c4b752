#pragma once

#include "polyagg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace polyagg::fixtures {

// nx-by-ny quadrilaterals on [x0, x1] x [y0, y1].
inline PolygonalMesh quad_mesh(int nx, int ny, double x0 = 0, double x1 = 1, double y0 = 0,
                               double y1 = 1)
{
    std::vector<Vec2> pts;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            pts.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
        }
    }
    std::vector<std::vector<int>> cells;
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return build_mesh(pts, cells);
}

inline PolygonalMesh tri_mesh(int nx, int ny)
{
    std::vector<Vec2> pts;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) pts.emplace_back(double(i) / nx, double(j) / ny);
    }
    std::vector<std::vector<int>> cells;
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return build_mesh(pts, cells);
}

// Quad mesh with interior nodes moved by a smooth map that keeps every cell convex.
inline PolygonalMesh distorted_quad_mesh(int n, double amplitude = 0.1)
{
    std::vector<Vec2> pts;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const double x = double(i) / n;
            const double y = double(j) / n;
            const double s = amplitude * std::sin(2 * std::numbers::pi * x) *
                             std::sin(2 * std::numbers::pi * y);
            pts.emplace_back(x + s, y + s);
        }
    }
    std::vector<std::vector<int>> cells;
    auto id = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return build_mesh(pts, cells);
}

// Random polygon that is star-shaped with respect to the origin: jittered angles keep every
// angular gap below pi, so the origin stays strictly inside.
inline Polygon random_star_polygon(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> jitter(0.0, 0.4);
    std::uniform_real_distribution<double> radius(0.2, 1.0);
    Polygon p;
    for (int i = 0; i < n; ++i) {
        const double a = 2 * std::numbers::pi * (i + jitter(rng)) / n;
        const double r = radius(rng);
        p.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    return p;
}

// Random simple polygon; may or may not be star-shaped (comb-like shapes included).
inline Polygon random_simple_polygon(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> count(3, 12);
    switch (kind(rng)) {
    case 0:
        return random_star_polygon(rng, count(rng));
    case 1: {
        // Comb with k teeth of random heights; star-shaped only when the teeth are short.
        std::uniform_int_distribution<int> teeth(1, 4);
        std::uniform_real_distribution<double> h(0.1, 3.0);
        const int k = teeth(rng);
        Polygon p{{0.0, 0.0}, {2.0 * k - 1.0, 0.0}};
        for (int t = k - 1; t >= 0; --t) {
            const double top = 1.0 + h(rng);
            p.emplace_back(2.0 * t + 1.0, top);
            p.emplace_back(2.0 * t, top);
            if (t > 0) {
                p.emplace_back(2.0 * t, 1.0);
                p.emplace_back(2.0 * t - 1.0, 1.0);
            }
        }
        return p;
    }
    default: {
        // L or U shaped polygons with random arm widths.
        std::uniform_real_distribution<double> w(0.05, 0.95);
        const double a = w(rng);
        const double b = w(rng);
        return {{0, 0}, {1, 0}, {1, b}, {a, b}, {a, 1}, {0, 1}};
    }
    }
}

// Small random mesh (at most 8 cells): a quad or triangle grid with jittered interior
// vertices, or a grid with some quads split into triangles.
inline PolygonalMesh random_small_mesh(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> dim(1, 4);
    int nx = 0, ny = 0;
    do {
        nx = dim(rng);
        ny = dim(rng);
    } while (nx * ny > 8 || nx * ny < 2);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::bernoulli_distribution coin(0.5);
    std::vector<Vec2> pts;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            Vec2 p{double(i), double(j)};
            if (i > 0 && i < nx) p.x() += jitter(rng);
            if (j > 0 && j < ny) p.y() += jitter(rng);
            pts.push_back(p);
        }
    }
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    std::vector<std::vector<int>> cells;
    int splits = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (nx * ny + splits < 8 && coin(rng)) {
                ++splits;
                cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        }
    }
    return build_mesh(pts, cells);
}

}  // namespace polyagg::fixtures
