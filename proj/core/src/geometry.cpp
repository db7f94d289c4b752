#include "polyagg/geometry.hpp"

#include "polyagg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyagg {

double signed_area(std::span<const Vec2> poly)
{
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    const Vec2 o = poly[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        twice += cross(poly[i] - o, poly[i + 1] - o);
    }
    return 0.5 * twice;
}

Vec2 centroid(std::span<const Vec2> poly)
{
    // Shift to the first vertex to limit cancellation on far-from-origin cells.
    const std::size_t n = poly.size();
    const Vec2 o = poly[0];
    double twice = 0.0;
    Vec2 acc = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i] - o;
        const Vec2 b = poly[(i + 1) % n] - o;
        const double c = cross(a, b);
        twice += c;
        acc += c * (a + b);
    }
    if (twice == 0.0) {
        throw GeometryError("centroid of a zero-area polygon");
    }
    return o + acc / (3.0 * twice);
}

double diameter(std::span<const Vec2> poly)
{
    double best = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            best = std::max(best, (poly[i] - poly[j]).squaredNorm());
        }
    }
    return std::sqrt(best);
}

double perimeter(std::span<const Vec2> poly)
{
    double len = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        len += (poly[(i + 1) % poly.size()] - poly[i]).norm();
    }
    return len;
}

double turn_sine(const Vec2& a, const Vec2& b, const Vec2& c)
{
    const Vec2 u = b - a;
    const Vec2 v = c - b;
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (u.dot(v) <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::abs(cross(u, v)) / (nu * nv);
}

bool is_straight(const Vec2& a, const Vec2& b, const Vec2& c, double tol)
{
    return turn_sine(a, b, c) < tol;
}

bool is_convex(std::span<const Vec2> poly, double tol)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[(i + n - 1) % n];
        const Vec2& b = poly[i];
        const Vec2& c = poly[(i + 1) % n];
        const Vec2 u = b - a;
        const Vec2 v = c - b;
        if (cross(u, v) < -tol * u.norm() * v.norm()) {
            return false;
        }
    }
    return true;
}

namespace {

int orient(const Vec2& a, const Vec2& b, const Vec2& c, double eps)
{
    const double v = cross(b - a, c - a);
    if (v > eps) return 1;
    if (v < -eps) return -1;
    return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p, double eps)
{
    return std::min(a.x(), b.x()) - eps <= p.x() && p.x() <= std::max(a.x(), b.x()) + eps &&
           std::min(a.y(), b.y()) - eps <= p.y() && p.y() <= std::max(a.y(), b.y()) + eps;
}

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double eps2,
                    double eps)
{
    const int o1 = orient(a, b, c, eps2);
    const int o2 = orient(a, b, d, eps2);
    const int o3 = orient(c, d, a, eps2);
    const int o4 = orient(c, d, b, eps2);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
        return true;
    }
    if (o1 == 0 && on_segment(a, b, c, eps)) return true;
    if (o2 == 0 && on_segment(a, b, d, eps)) return true;
    if (o3 == 0 && on_segment(c, d, a, eps)) return true;
    if (o4 == 0 && on_segment(c, d, b, eps)) return true;
    return false;
}

}  // namespace

bool is_simple(std::span<const Vec2> poly)
{
    const std::size_t n = poly.size();
    if (n < 3) return false;
    const double d = diameter(poly);
    if (d == 0.0) return false;
    const double eps = 1e-13 * d;
    const double eps2 = 1e-13 * d * d;
    for (std::size_t i = 0; i < n; ++i) {
        if ((poly[(i + 1) % n] - poly[i]).norm() <= eps) return false;
        // Adjacent edges may only share their common vertex.
        if (std::isinf(turn_sine(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n])) &&
            std::abs(cross(poly[i] - poly[(i + n - 1) % n], poly[(i + 1) % n] - poly[i])) <= eps2) {
            return false;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_touch(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n], eps2, eps)) {
                return false;
            }
        }
    }
    return true;
}

bool point_in_polygon(std::span<const Vec2> poly, const Vec2& p, double tol)
{
    const std::size_t n = poly.size();
    const double d = diameter(poly);
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[j];
        const Vec2& b = poly[i];
        const Vec2 ab = b - a;
        const double len = ab.norm();
        const double dist = std::abs(cross(ab, p - a)) / len;
        const double t = ab.dot(p - a) / (len * len);
        if (dist <= tol * d && t >= -tol && t <= 1.0 + tol) {
            return false;
        }
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * ab.x() / ab.y();
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

Polygon clip_half_plane(std::span<const Vec2> poly, const Vec2& a, const Vec2& b)
{
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    const Vec2 dir = b - a;
    const double scale = dir.norm();
    auto side = [&](const Vec2& p) {
        const double s = cross(dir, p - a) / scale;
        return s;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double sp = side(p);
        const double sq = side(q);
        if (sp >= 0.0) out.push_back(p);
        if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    // Drop consecutive duplicates produced by vertices lying on the clip line.
    Polygon cleaned;
    for (const Vec2& p : out) {
        if (cleaned.empty() || (p - cleaned.back()).norm() > 0.0) cleaned.push_back(p);
    }
    while (cleaned.size() > 1 && (cleaned.front() - cleaned.back()).norm() == 0.0) {
        cleaned.pop_back();
    }
    return cleaned;
}

BoundingBox bounding_box(std::span<const Vec2> poly)
{
    BoundingBox box{poly[0], poly[0]};
    for (const Vec2& p : poly) {
        box.lo = box.lo.cwiseMin(p);
        box.hi = box.hi.cwiseMax(p);
    }
    return box;
}

Polygon polygon_kernel(std::span<const Vec2> poly)
{
    const BoundingBox box = bounding_box(poly);
    Polygon kernel{box.lo, {box.hi.x(), box.lo.y()}, box.hi, {box.lo.x(), box.hi.y()}};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n && kernel.size() >= 3; ++i) {
        kernel = clip_half_plane(kernel, poly[i], poly[(i + 1) % n]);
    }
    if (kernel.size() < 3 || signed_area(kernel) <= 0.0) {
        return {};
    }
    return kernel;
}

std::vector<std::array<int, 3>> triangulate(std::span<const Vec2> poly)
{
    const int n = static_cast<int>(poly.size());
    std::vector<std::array<int, 3>> tris;
    if (n < 3) throw GeometryError("cannot triangulate a polygon with fewer than 3 vertices");
    const double d = diameter(poly);
    const double eps_area = 1e-14 * d * d;

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;

    auto inside_or_on = [&](const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
        return cross(b - a, p - a) >= -eps_area && cross(c - b, p - b) >= -eps_area &&
               cross(a - c, p - c) >= -eps_area;
    };

    while (idx.size() > 3) {
        const int m = static_cast<int>(idx.size());
        bool clipped = false;
        for (int i = 0; i < m; ++i) {
            const int ip = idx[(i + m - 1) % m];
            const int ic = idx[i];
            const int in = idx[(i + 1) % m];
            const Vec2& a = poly[ip];
            const Vec2& b = poly[ic];
            const Vec2& c = poly[in];
            if (cross(b - a, c - b) <= eps_area) continue;
            bool blocked = false;
            for (int j = 0; j < m && !blocked; ++j) {
                const int v = idx[j];
                if (v == ip || v == ic || v == in) continue;
                blocked = inside_or_on(a, b, c, poly[v]);
            }
            if (blocked) continue;
            tris.push_back({ip, ic, in});
            idx.erase(idx.begin() + i);
            clipped = true;
            break;
        }
        if (!clipped) {
            throw GeometryError("ear clipping failed: no valid ear");
        }
    }
    if (cross(poly[idx[1]] - poly[idx[0]], poly[idx[2]] - poly[idx[1]]) <= eps_area) {
        throw GeometryError("ear clipping failed: degenerate final triangle");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

bool clip_segment_convex(std::span<const Vec2> poly, const Vec2& p, const Vec2& q, double& t0,
                         double& t1)
{
    t0 = 0.0;
    t1 = 1.0;
    const Vec2 d = q - p;
    const std::size_t n = poly.size();
    const double scale = diameter(poly);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2 e = poly[(i + 1) % n] - a;
        const Vec2 normal(-e.y(), e.x());  // inward for counter-clockwise loops
        const double nn = normal.norm();
        const double num = normal.dot(p - a) / nn + 1e-12 * scale;
        const double den = normal.dot(d) / nn;
        if (std::abs(den) < 1e-300) {
            if (num < 0.0) return false;
            continue;
        }
        const double t = -num / den;
        if (den > 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace polyagg
