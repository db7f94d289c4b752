#include "polyagg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyagg {

double rho1(std::span<const Vec2> polygon)
{
    if (is_convex(polygon)) return 1.0;
    // Work in coordinates centered on the first vertex and scaled by the diameter so the
    // clipping round-off does not depend on where the polygon sits.
    const double d = diameter(polygon);
    Polygon local;
    local.reserve(polygon.size());
    for (const Vec2& p : polygon) local.push_back((p - polygon[0]) / d);
    const double area = std::abs(signed_area(local));
    const Polygon kernel = polygon_kernel(local);
    if (kernel.empty()) return 0.0;
    const double ratio = signed_area(kernel) / area;
    if (ratio < kKernelAreaTol) return 0.0;
    return std::min(ratio, 1.0);
}

double rho2(std::span<const Vec2> polygon)
{
    const double area = std::abs(signed_area(polygon));
    double shortest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polygon.size(); ++i) {
        shortest = std::min(shortest, (polygon[(i + 1) % polygon.size()] - polygon[i]).norm());
    }
    return std::min(std::sqrt(area), shortest) / diameter(polygon);
}

double rho3(std::span<const Vec2> polygon) { return 3.0 / static_cast<double>(polygon.size()); }

double rho4(std::span<const Vec2> polygon, double tol)
{
    double worst = 1.0;
    const std::size_t n = polygon.size();
    for (const auto& run : collinear_runs(polygon, tol)) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (int e : run) {
            const double len = (polygon[(e + 1) % n] - polygon[e]).norm();
            lo = std::min(lo, len);
            hi = std::max(hi, len);
        }
        worst = std::min(worst, lo / hi);
    }
    return worst;
}

double combine_indicators(double r1, double r2, double r3, double r4)
{
    return std::sqrt((r1 * r2 + r1 * r3 + r1 * r4) / 3.0);
}

QualityScores quality(std::span<const Vec2> polygon, double tol)
{
    QualityScores s;
    s.rho1 = rho1(polygon);
    s.rho2 = rho2(polygon);
    s.rho3 = rho3(polygon);
    s.rho4 = rho4(polygon, tol);
    s.rho = combine_indicators(s.rho1, s.rho2, s.rho3, s.rho4);
    return s;
}

QualityReport mesh_quality_report(const PolygonalMesh& mesh)
{
    QualityReport report;
    report.cells.reserve(mesh.num_cells());
    double sum = 0.0;
    report.min_rho = mesh.num_cells() ? 1.0 : 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const QualityScores s = quality(mesh.cell_polygon(c));
        report.cells.push_back(s);
        sum += s.rho;
        report.min_rho = std::min(report.min_rho, s.rho);
        const int bin = std::clamp(static_cast<int>(s.rho * 10.0), 0, 9);
        ++report.histogram[bin];
    }
    if (mesh.num_cells()) report.mean_rho = sum / mesh.num_cells();
    return report;
}

}  // namespace polyagg
