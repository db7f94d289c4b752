#pragma once

#include "polyagg/geometry.hpp"

#include <span>
#include <vector>

namespace polyagg {

/// Points and weights on the unit interval [0, 1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, exact up to degree 2n - 1.
LineRule gauss_legendre(int n);

/// n-point Gauss-Lobatto rule (n >= 2, endpoints included), exact up to degree 2n - 3.
LineRule gauss_lobatto(int n);

/// The k - 1 internal Gauss-Lobatto nodes of order k on the segment a -> b, in order from a.
/// Empty for k < 2.
std::vector<Vec2> gauss_lobatto_points(int k, const Vec2& a, const Vec2& b);

struct PlaneRule {
    std::vector<Vec2> points;
    std::vector<double> weights;

    double sum_weights() const;
};

/// Collapsed Gauss-Legendre (conical product) rule on a triangle, exact up to `degree`.
PlaneRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

/// Rule exact up to `degree` on a simple polygon, built on its ear-clipping triangles.
PlaneRule polygon_quadrature(std::span<const Vec2> polygon, int degree);

}  // namespace polyagg
