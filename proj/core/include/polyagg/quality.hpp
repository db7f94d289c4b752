#pragma once

#include "polyagg/mesh.hpp"

#include <array>
#include <span>
#include <vector>

namespace polyagg {

/// Regularity indicators of one polygon, each in [0, 1]:
///   rho1  kernel area over polygon area (star-shapedness)
///   rho2  min(sqrt(area), shortest edge) over diameter (edge/size balance)
///   rho3  3 over the number of edges
///   rho4  worst shortest/longest edge ratio over the collinear edge chains
///   rho   sqrt((rho1 rho2 + rho1 rho3 + rho1 rho4) / 3)
struct QualityScores {
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho3 = 0.0;
    double rho4 = 0.0;
    double rho = 0.0;
};

/// Kernels smaller than this fraction of the polygon area count as empty.
inline constexpr double kKernelAreaTol = 1e-14;

double rho1(std::span<const Vec2> polygon);
double rho2(std::span<const Vec2> polygon);
double rho3(std::span<const Vec2> polygon);
double rho4(std::span<const Vec2> polygon, double tol = kCollinearTol);

double combine_indicators(double r1, double r2, double r3, double r4);

QualityScores quality(std::span<const Vec2> polygon, double tol = kCollinearTol);

struct QualityReport {
    std::vector<QualityScores> cells;
    double min_rho = 0.0;
    double mean_rho = 0.0;
    std::array<int, 10> histogram{};  // rho binned on [0, 1] in steps of 0.1
};

QualityReport mesh_quality_report(const PolygonalMesh& mesh);

}  // namespace polyagg
