#include "polyagg/quadrature.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polyagg;

namespace {

// Exact integral of x^a y^b over a polygon via the divergence theorem:
// int x^a y^b = 1/(a+1) * sum over edges of int x^(a+1) y^b n_x ds, each edge integral taken
// with a Gauss rule of ample order in the edge parameter.
double monomial_integral(const Polygon& p, int a, int b)
{
    const LineRule g = gauss_legendre(8);
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec2& s = p[i];
        const Vec2& e = p[(i + 1) % p.size()];
        double edge = 0.0;
        for (std::size_t q = 0; q < g.points.size(); ++q) {
            const Vec2 x = s + g.points[q] * (e - s);
            edge += g.weights[q] * std::pow(x.x(), a + 1) * std::pow(x.y(), b);
        }
        total += edge * (e.y() - s.y());  // n_x ds = dy
    }
    return total / (a + 1);
}

}  // namespace

TEST(Quadrature, GaussLegendreNodes)
{
    const LineRule g = gauss_legendre(2);
    EXPECT_NEAR(g.points[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(g.points[1], 0.5 + 0.5 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(g.weights[0], 0.5, 1e-15);
    for (int n = 1; n <= 10; ++n) {
        const LineRule r = gauss_legendre(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], d);
            EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14) << "n=" << n << " d=" << d;
        }
    }
}

TEST(Quadrature, GaussLobattoNodes)
{
    const LineRule g = gauss_lobatto(4);
    EXPECT_NEAR(g.points[1], 0.5 * (1 - 1 / std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(g.points[2], 0.5 * (1 + 1 / std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(g.weights[0], 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(g.weights[1], 5.0 / 12.0, 1e-15);
    for (int n = 2; n <= 8; ++n) {
        const LineRule r = gauss_lobatto(n);
        for (int d = 0; d <= 2 * n - 3; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], d);
            EXPECT_NEAR(s, 1.0 / (d + 1), 1e-14);
        }
    }
}

TEST(Quadrature, EdgePoints)
{
    auto p = gauss_lobatto_points(2, Vec2(0, 0), Vec2(1, 0));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_NEAR((p[0] - Vec2(0.5, 0)).norm(), 0.0, 1e-15);
    p = gauss_lobatto_points(3, Vec2(0, 0), Vec2(1, 0));
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NEAR(p[0].x(), 0.27639320225002103, 1e-15);
    EXPECT_NEAR(p[1].x(), 0.72360679774997897, 1e-15);
    p = gauss_lobatto_points(2, Vec2(0, 0), Vec2(2, 2));
    EXPECT_NEAR((p[0] - Vec2(1, 1)).norm(), 0.0, 1e-15);
    EXPECT_TRUE(gauss_lobatto_points(1, Vec2(0, 0), Vec2(1, 0)).empty());
}

TEST(Quadrature, PolygonExamples)
{
    const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const PlaneRule r = polygon_quadrature(sq, 4);
    EXPECT_NEAR(r.sum_weights(), 1.0, 1e-15);
    double s = 0.0;
    for (std::size_t q = 0; q < r.points.size(); ++q) {
        s += r.weights[q] * std::pow(r.points[q].x() * r.points[q].y(), 2);
    }
    EXPECT_NEAR(s, 1.0 / 9.0, 1e-15);

    const Polygon tri{{0, 0}, {1, 0}, {0, 1}};
    const PlaneRule t = polygon_quadrature(tri, 1);
    double sx = 0.0;
    for (std::size_t q = 0; q < t.points.size(); ++q) sx += t.weights[q] * t.points[q].x();
    EXPECT_NEAR(sx, 1.0 / 6.0, 1e-15);
}

TEST(Quadrature, ExactOnRandomPolygons)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Polygon p = fixtures::random_simple_polygon(rng);
        for (int degree = 0; degree <= 8; ++degree) {
            const PlaneRule r = polygon_quadrature(p, degree);
            EXPECT_NEAR(r.sum_weights(), signed_area(p), 1e-12 * signed_area(p));
            for (int a = 0; a <= degree; ++a) {
                const int b = degree - a;
                double s = 0.0;
                for (std::size_t q = 0; q < r.points.size(); ++q) {
                    s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
                }
                const double exact = monomial_integral(p, a, b);
                EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}
