#pragma once

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace polyagg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

using Polygon = std::vector<Vec2>;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Shoelace signed area; positive for counter-clockwise loops.
double signed_area(std::span<const Vec2> poly);

/// Area-weighted centroid. Requires a nonzero signed area.
Vec2 centroid(std::span<const Vec2> poly);

/// Maximum pairwise vertex distance.
double diameter(std::span<const Vec2> poly);

double perimeter(std::span<const Vec2> poly);

/// Relative turn at `b` on the path a -> b -> c: |cross| / (|ab| |bc|).
/// Returns +inf when the path turns by 90 degrees or more (including reversals).
double turn_sine(const Vec2& a, const Vec2& b, const Vec2& c);

/// True when the path a -> b -> c continues straight within `tol`.
bool is_straight(const Vec2& a, const Vec2& b, const Vec2& c, double tol);

bool is_convex(std::span<const Vec2> poly, double tol = 1e-12);

/// No two non-adjacent edges intersect and no adjacent pair folds back.
bool is_simple(std::span<const Vec2> poly);

/// Strict interior test; points on the boundary (within `tol`) return false.
bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p, double tol = 1e-12);

/// Keeps the part of a convex polygon on the left of the directed line a -> b.
Polygon clip_half_plane(std::span<const Vec2> poly, const Vec2& a, const Vec2& b);

/// Kernel of a counter-clockwise simple polygon, computed by clipping a bounding box
/// against the inward half-plane of every edge. Empty when the polygon is not star-shaped.
Polygon polygon_kernel(std::span<const Vec2> poly);

/// Ear-clipping triangulation of a simple counter-clockwise polygon. Collinear
/// (hanging) vertices are kept as triangle corners but never clipped as degenerate ears.
/// Throws GeometryError when no valid ear can be found.
std::vector<std::array<int, 3>> triangulate(std::span<const Vec2> poly);

/// Clips the segment [p, q] by a convex counter-clockwise polygon. Returns false when
/// nothing is left; otherwise writes the surviving parameter range on p + t (q - p).
bool clip_segment_convex(std::span<const Vec2> poly, const Vec2& p, const Vec2& q, double& t0,
                         double& t1);

struct BoundingBox {
    Vec2 lo;
    Vec2 hi;
};

BoundingBox bounding_box(std::span<const Vec2> poly);

}  // namespace polyagg
