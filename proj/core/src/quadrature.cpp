#include "polyagg/quadrature.hpp"

#include "polyagg/errors.hpp"

#include <cmath>
#include <numbers>

namespace polyagg {

namespace {

// Legendre P_n and P_{n-1} at x by the three-term recurrence.
std::pair<double, double> legendre(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) return {p0, 0.0};
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

}  // namespace

LineRule gauss_legendre(int n)
{
    if (n < 1) throw InputError("Gauss-Legendre rule needs at least one point");
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const auto [p, pm1] = legendre(n, x);
            dp = n * (x * p - pm1) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto [p, pm1] = legendre(n, x);
        dp = n * (x * p - pm1) / (x * x - 1.0);
        // Map from [-1, 1] to [0, 1], ascending.
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

LineRule gauss_lobatto(int n)
{
    if (n < 2) throw InputError("Gauss-Lobatto rule needs at least two points");
    const int N = n - 1;
    LineRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i <= N; ++i) {
        // Chebyshev-Gauss-Lobatto start, Newton on (1 - x^2) P'_N.
        double x = -std::cos(std::numbers::pi * i / N);
        if (i > 0 && i < N) {
            for (int it = 0; it < 100; ++it) {
                const auto [p, pm1] = legendre(N, x);
                const double dx = (x * p - pm1) / (n * p);
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
        }
        const double p = legendre(N, x).first;
        rule.points[i] = 0.5 * (x + 1.0);
        rule.weights[i] = 1.0 / (N * n * p * p);
    }
    return rule;
}

std::vector<Vec2> gauss_lobatto_points(int k, const Vec2& a, const Vec2& b)
{
    std::vector<Vec2> out;
    if (k < 2) return out;
    const LineRule rule = gauss_lobatto(k + 1);
    for (int i = 1; i < k; ++i) out.push_back(a + rule.points[i] * (b - a));
    return out;
}

double PlaneRule::sum_weights() const
{
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

PlaneRule triangle_quadrature(const Vec2& a, const Vec2& b, const Vec2& c, int degree)
{
    if (degree < 0) throw InputError("quadrature degree must be non-negative");
    // x = a + u (b - a) + (1 - u) v (c - a); Jacobian 2|T| (1 - u) adds one degree in u.
    const LineRule gu = gauss_legendre((degree + 3) / 2);
    const LineRule gv = gauss_legendre(degree / 2 + 1);
    const double twice_area = cross(b - a, c - a);
    PlaneRule rule;
    rule.points.reserve(gu.points.size() * gv.points.size());
    rule.weights.reserve(gu.points.size() * gv.points.size());
    for (std::size_t i = 0; i < gu.points.size(); ++i) {
        const double u = gu.points[i];
        for (std::size_t j = 0; j < gv.points.size(); ++j) {
            const double v = gv.points[j];
            rule.points.push_back(a + u * (b - a) + (1.0 - u) * v * (c - a));
            rule.weights.push_back(twice_area * (1.0 - u) * gu.weights[i] * gv.weights[j]);
        }
    }
    return rule;
}

PlaneRule polygon_quadrature(std::span<const Vec2> polygon, int degree)
{
    PlaneRule rule;
    for (const auto& t : triangulate(polygon)) {
        PlaneRule tri = triangle_quadrature(polygon[t[0]], polygon[t[1]], polygon[t[2]], degree);
        rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
        rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
    }
    return rule;
}

}  // namespace polyagg
