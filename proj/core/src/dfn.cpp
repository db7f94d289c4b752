#include "polyagg/dfn.hpp"

#include "polyagg/errors.hpp"
#include "polyagg/expression.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace polyagg {

Vec2 Fracture::to_local(const Vec3& p) const
{
    const Vec3 d = p - origin;
    return {tangent_u.dot(d), tangent_v.dot(d)};
}

Vec3 Fracture::to_global(const Vec2& p) const
{
    return origin + p.x() * tangent_u + p.y() * tangent_v;
}

double Fracture::diameter() const
{
    double d = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            d = std::max(d, (vertices[i] - vertices[j]).norm());
        }
    }
    return d;
}

Fracture make_fracture(int id, std::vector<Vec3> vertices, const Eigen::Matrix2d& K)
{
    const std::string name = "fracture " + std::to_string(id);
    if (vertices.size() < 3) throw InputError(name + ": needs at least three vertices");
    Fracture f;
    f.id = id;
    f.vertices = std::move(vertices);
    const double diam = f.diameter();
    if (!(diam > 0.0)) throw InputError(name + ": degenerate polygon");

    // Newell normal follows the vertex order.
    Vec3 normal = Vec3::Zero();
    const std::size_t n = f.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& p = f.vertices[i];
        const Vec3& q = f.vertices[(i + 1) % n];
        normal += (p - f.vertices[0]).cross(q - f.vertices[0]);
    }
    if (normal.norm() <= 1e-14 * diam * diam) throw InputError(name + ": zero area");
    f.normal = normal.normalized();
    f.origin = f.vertices[0];
    Vec3 u = f.vertices[1] - f.vertices[0];
    u -= f.normal.dot(u) * f.normal;
    if (u.norm() <= 1e-14 * diam) throw InputError(name + ": repeated first vertex");
    f.tangent_u = u.normalized();
    f.tangent_v = f.normal.cross(f.tangent_u);

    for (const Vec3& p : f.vertices) {
        if (std::abs(f.plane_distance(p)) > 1e-10 * diam) {
            throw InputError(name + ": vertices are not coplanar");
        }
        f.polygon.push_back(f.to_local(p));
    }
    if (!is_convex(f.polygon) || signed_area(f.polygon) <= 0.0) {
        throw InputError(name + ": polygon is not convex");
    }
    if (std::abs(K(0, 1) - K(1, 0)) > 1e-12 * K.norm() || K(0, 0) <= 0.0 || K.determinant() <= 0.0) {
        throw InputError(name + ": transmissivity is not symmetric positive definite");
    }
    f.K = K;
    return f;
}

namespace {

bool inside_convex(std::span<const Vec2> poly, const Vec2& p, double tol)
{
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = poly[(i + 1) % n] - poly[i];
        if (cross(e, p - poly[i]) < -tol * e.norm()) return false;
    }
    return true;
}

// Positive-length part of the segment [a, b] (in fracture f's plane) inside f's polygon.
bool clip_to_fracture(const Fracture& f, const Vec3& a, const Vec3& b, double tol, Vec3& ca,
                      Vec3& cb)
{
    double t0 = 0.0, t1 = 1.0;
    if (!clip_segment_convex(f.polygon, f.to_local(a), f.to_local(b), t0, t1)) return false;
    ca = a + t0 * (b - a);
    cb = a + t1 * (b - a);
    return (cb - ca).norm() > tol;
}

std::optional<TraceSegment> intersect_pair(const Fracture& fi, const Fracture& fj, int i, int j)
{
    const double tol = 1e-10 * std::max(fi.diameter(), fj.diameter());
    const Vec3 dir = fi.normal.cross(fj.normal);
    if (dir.norm() < 1e-12) {
        if (std::abs(fj.plane_distance(fi.origin)) > tol) return std::nullopt;
        Polygon overlap;
        for (const Vec3& p : fi.vertices) overlap.push_back(fj.to_local(p));
        if (signed_area(overlap) < 0.0) std::reverse(overlap.begin(), overlap.end());
        const std::size_t n = fj.polygon.size();
        for (std::size_t e = 0; e < n && !overlap.empty(); ++e) {
            overlap = clip_half_plane(overlap, fj.polygon[e], fj.polygon[(e + 1) % n]);
        }
        if (overlap.size() >= 3 && signed_area(overlap) > tol * tol) {
            throw InputError("fractures " + std::to_string(i) + " and " + std::to_string(j) +
                             " are coplanar and overlap");
        }
        return std::nullopt;
    }

    // Points where polygon i meets plane j.
    std::vector<Vec3> hits;
    const std::size_t n = fi.vertices.size();
    for (std::size_t e = 0; e < n; ++e) {
        const Vec3& p = fi.vertices[e];
        const Vec3& q = fi.vertices[(e + 1) % n];
        const double sp = fj.plane_distance(p);
        const double sq = fj.plane_distance(q);
        if (std::abs(sp) <= tol) {
            hits.push_back(p);
        } else if (std::abs(sq) > tol && (sp > 0.0) != (sq > 0.0)) {
            hits.push_back(p + (q - p) * (sp / (sp - sq)));
        }
    }
    if (hits.size() < 2) return std::nullopt;
    const Vec3 d = dir.normalized();
    auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(),
                                        [&](const Vec3& a, const Vec3& b) { return d.dot(a) < d.dot(b); });
    const Vec3 a = *lo;
    const Vec3 b = *hi;
    if ((b - a).norm() <= tol) return std::nullopt;

    Vec3 ca, cb;
    if (!clip_to_fracture(fj, a, b, tol, ca, cb)) return std::nullopt;
    TraceSegment t;
    t.fractures = {i, j};
    t.a = ca;
    t.b = cb;
    t.local[0] = {fi.to_local(ca), fi.to_local(cb)};
    t.local[1] = {fj.to_local(ca), fj.to_local(cb)};
    return t;
}

}  // namespace

std::vector<TraceSegment> compute_traces(std::span<const Fracture> fractures)
{
    std::vector<TraceSegment> traces;
    for (std::size_t i = 0; i < fractures.size(); ++i) {
        for (std::size_t j = i + 1; j < fractures.size(); ++j) {
            auto t = intersect_pair(fractures[i], fractures[j], static_cast<int>(i), static_cast<int>(j));
            if (!t) continue;
            t->id = static_cast<int>(traces.size());
            traces.push_back(*t);
        }
    }
    return traces;
}

TraceSegment make_trace(int id, const Fracture& fi, const Fracture& fj, const Vec3& a,
                        const Vec3& b)
{
    const double tol = 1e-10 * std::max(fi.diameter(), fj.diameter());
    const std::string name = "trace " + std::to_string(id);
    if ((b - a).norm() <= tol) throw InputError(name + ": zero length");
    for (const Fracture* f : {&fi, &fj}) {
        for (const Vec3& p : {a, b}) {
            if (std::abs(f->plane_distance(p)) > tol || !inside_convex(f->polygon, f->to_local(p), tol)) {
                throw InputError(name + ": endpoint outside fracture " + std::to_string(f->id));
            }
        }
    }
    TraceSegment t;
    t.id = id;
    t.fractures = {fi.id, fj.id};
    t.a = a;
    t.b = b;
    t.local[0] = {fi.to_local(a), fi.to_local(b)};
    t.local[1] = {fj.to_local(a), fj.to_local(b)};
    return t;
}

double FractureNetwork::diameter() const
{
    if (fractures.empty()) return 0.0;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Fracture& f : fractures) {
        for (const Vec3& p : f.vertices) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    }
    return (hi - lo).norm();
}

void validate_network(const FractureNetwork& net)
{
    const int n = static_cast<int>(net.fractures.size());
    if (n == 0) throw InputError("network has no fractures");
    for (int i = 0; i < n; ++i) {
        if (net.fractures[i].id != i) throw InputError("fracture ids must be 0..n-1 in order");
    }
    if (!net.sources.empty() && static_cast<int>(net.sources.size()) != n) {
        throw InputError("one source per fracture expected");
    }
    if (net.has_exact() && (static_cast<int>(net.exact.size()) != n ||
                            static_cast<int>(net.exact_gradient.size()) != n)) {
        throw InputError("exact solution and gradient needed for every fracture");
    }
    if (net.dirichlet.empty()) throw InputError("Dirichlet boundary is empty");

    const double tol = 1e-10 * net.diameter();
    for (const DirichletSpec& bc : net.dirichlet) {
        if (!bc.value) throw InputError("Dirichlet condition without a value");
        if (bc.fracture >= n) throw InputError("Dirichlet condition on unknown fracture");
        if (!bc.plane) continue;
        const Vec3 normal = bc.plane->head<3>();
        if (normal.norm() == 0.0) throw InputError("Dirichlet plane with zero normal");
        bool touches = false;
        for (const Fracture& f : net.fractures) {
            if (bc.fracture >= 0 && f.id != bc.fracture) continue;
            const std::size_t m = f.vertices.size();
            for (std::size_t e = 0; e < m && !touches; ++e) {
                auto on = [&](const Vec3& p) {
                    return std::abs(normal.dot(p) - (*bc.plane)[3]) <= tol * normal.norm();
                };
                touches = on(f.vertices[e]) && on(f.vertices[(e + 1) % m]);
            }
        }
        if (!touches) throw InputError("Dirichlet plane '" + bc.description + "' contains no fracture edge");
    }

    std::vector<int> trace_count(n, 0);
    for (const TraceSegment& t : net.traces) {
        const auto [i, j] = t.fractures;
        if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
            throw InputError("trace " + std::to_string(t.id) + " has an invalid fracture pair");
        }
        ++trace_count[i];
        ++trace_count[j];
        for (int k = 0; k < n; ++k) {
            const Fracture& f = net.fractures[k];
            const double d0 = std::abs(f.plane_distance(t.a));
            const double d1 = std::abs(f.plane_distance(t.b));
            if (k == i || k == j) {
                if (d0 > tol || d1 > tol) {
                    throw InputError("trace " + std::to_string(t.id) + " leaves the plane of fracture " +
                                     std::to_string(k));
                }
                continue;
            }
            Vec3 ca, cb;
            if (d0 <= tol && d1 <= tol && clip_to_fracture(f, t.a, t.b, tol, ca, cb)) {
                throw InputError("trace " + std::to_string(t.id) + " is shared by more than two fractures");
            }
        }
    }
    if (n > 1) {
        for (int i = 0; i < n; ++i) {
            if (trace_count[i] == 0) {
                throw InputError("fracture " + std::to_string(i) + " intersects no other fracture");
            }
        }
    }
}

FractureNetwork network1()
{
    using std::numbers::pi;
    FractureNetwork net;
    net.name = "network1";
    net.fractures.push_back(make_fracture(0, {{-1, -1, 0}, {0.5, -1, 0}, {0.5, 1, 0}, {-1, 1, 0}}));
    net.fractures.push_back(make_fracture(1, {{-1, 0, -1}, {0, 0, -1}, {0, 0, 1}, {-1, 0, 1}}));
    net.fractures.push_back(make_fracture(2, {{-0.5, -1, -1}, {-0.5, 1, -1}, {-0.5, 1, 1}, {-0.5, -1, 1}}));
    net.traces = compute_traces(net.fractures);

    // F1 (z = 0)
    net.exact.push_back([](const Vec3& p) {
        const double x = p.x(), y = p.y();
        const double th = std::atan2(y, x);
        return -0.1 * (0.5 + x) * (x * x * x + 8.0 * x * y * (x * x + y * y) * th);
    });
    net.exact_gradient.push_back([](const Vec3& p) {
        const double x = p.x(), y = p.y();
        const double th = std::atan2(y, x);
        const double r2 = x * x + y * y;
        const double gx = -x * x * x / 10.0 - 4.0 * x * y * r2 * th / 5.0 -
                          (2.0 * x + 1.0) * (16.0 * x * x * y * th + 3.0 * x * x - 8.0 * x * y * y + 8.0 * y * r2 * th) / 20.0;
        const double gy = -2.0 * x * (2.0 * x + 1.0) * (x * y + 2.0 * y * y * th + r2 * th) / 5.0;
        return Vec3(gx, gy, 0.0);
    });
    net.sources.push_back([](const Vec3& p) {
        const double x = p.x(), y = p.y();
        const double th = std::atan2(y, x);
        return 1.6 * x * x * x + 14.4 * x * x * y * th + 2.0 * x * x - 3.2 * x * y * y + 4.8 * x * y * th +
               0.3 * x + 1.6 * y * y * y * th - 0.8 * y * y;
    });

    // F2 (y = 0)
    net.exact.push_back([](const Vec3& p) {
        const double x = p.x(), z = p.z();
        return -0.1 * (0.5 + x) * x * x * x + pi * 0.8 * (0.5 + x) * x * x * x * std::abs(z);
    });
    net.exact_gradient.push_back([](const Vec3& p) {
        const double x = p.x(), z = p.z();
        const double gx = x * x * (8.0 * x + 3.0) * (8.0 * pi * std::abs(z) - 1.0) / 20.0;
        const double gz = 0.8 * pi * (0.5 + x) * x * x * x * (z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0));
        return Vec3(gx, 0.0, gz);
    });
    net.sources.push_back([](const Vec3& p) {
        const double x = p.x(), z = p.z();
        return -0.3 * x * (4.0 * x + 1.0) * (8.0 * pi * std::abs(z) - 1.0);
    });

    // F3 (x = -1/2)
    net.exact.push_back([](const Vec3& p) {
        const double y = p.y(), z = p.z();
        return y * (y - 1.0) * (y + 1.0) * z * (z - 1.0);
    });
    net.exact_gradient.push_back([](const Vec3& p) {
        const double y = p.y(), z = p.z();
        return Vec3(0.0, (3.0 * y * y - 1.0) * z * (z - 1.0), y * (y * y - 1.0) * (2.0 * z - 1.0));
    });
    net.sources.push_back([](const Vec3& p) {
        const double y = p.y(), z = p.z();
        return -(6.0 * y * z * (z - 1.0) + 2.0 * (y * y * y - y));
    });

    for (int i = 0; i < 3; ++i) {
        DirichletSpec bc;
        bc.fracture = i;
        bc.value = net.exact[i];
        bc.description = "exact solution on fracture " + std::to_string(i);
        net.dirichlet.push_back(bc);
    }
    validate_network(net);
    return net;
}

namespace {

Field3 compile(const std::string& text, int line)
{
    try {
        Expression e = Expression::parse(text);
        return [e](const Vec3& p) { return e(p.x(), p.y(), p.z()); };
    } catch (const InputError& err) {
        throw ParseError(err.what(), line);
    }
}

std::string rest_of_line(std::istringstream& fields)
{
    std::string rest;
    std::getline(fields, rest);
    const auto first = rest.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    rest.erase(0, first);
    rest.erase(rest.find_last_not_of(" \t\r") + 1);
    return rest;
}

}  // namespace

FractureNetwork read_network(std::istream& in, const std::string& name)
{
    FractureNetwork net;
    net.name = name;
    struct RawTrace {
        int i, j;
        Vec3 a, b;
        int line;
    };
    std::vector<RawTrace> raw_traces;
    std::vector<int> fracture_lines;
    std::vector<std::string> source_text;

    std::string line;
    int line_no = 0;
    auto next = [&](std::istringstream& fields) {
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            fields.clear();
            fields.str(line);
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) { throw ParseError(what, line_no); };
    auto no_extra = [&](std::istringstream& fields) {
        std::string extra;
        if (fields >> extra) fail("unexpected token '" + extra + "'");
    };

    std::istringstream fields;
    while (next(fields)) {
        std::string tag;
        fields >> tag;
        if (tag == "F") {
            long long count = 0;
            if (!(fields >> count) || count < 3) fail("expected 'F <count>' with count >= 3");
            no_extra(fields);
            const int header_line = line_no;
            std::vector<Vec3> verts;
            for (long long v = 0; v < count; ++v) {
                if (!next(fields)) fail("unexpected end of file in fracture block");
                Vec3 p;
                if (!(fields >> p.x() >> p.y() >> p.z())) fail("expected vertex coordinates 'x y z'");
                no_extra(fields);
                verts.push_back(p);
            }
            try {
                net.fractures.push_back(make_fracture(static_cast<int>(net.fractures.size()), std::move(verts)));
            } catch (const InputError& err) {
                throw ParseError(err.what(), header_line);
            }
            fracture_lines.push_back(header_line);
            source_text.emplace_back();
        } else if (tag == "K") {
            if (net.fractures.empty()) fail("'K' before any fracture");
            double kxx = 0, kxy = 0, kyy = 0;
            if (!(fields >> kxx >> kxy >> kyy)) fail("expected 'K kxx kxy kyy'");
            no_extra(fields);
            Eigen::Matrix2d K;
            K << kxx, kxy, kxy, kyy;
            Fracture& f = net.fractures.back();
            try {
                f = make_fracture(f.id, f.vertices, K);
            } catch (const InputError& err) {
                fail(err.what());
            }
        } else if (tag == "S") {
            if (net.fractures.empty()) fail("'S' before any fracture");
            const std::string expr = rest_of_line(fields);
            if (expr.empty()) fail("expected 'S <expression>'");
            compile(expr, line_no);
            source_text.back() = expr;
        } else if (tag == "T") {
            RawTrace t{};
            if (!(fields >> t.i >> t.j >> t.a.x() >> t.a.y() >> t.a.z() >> t.b.x() >> t.b.y() >> t.b.z())) {
                fail("expected 'T i j x0 y0 z0 x1 y1 z1'");
            }
            no_extra(fields);
            t.line = line_no;
            raw_traces.push_back(t);
        } else if (tag == "BC") {
            std::string kind, where;
            if (!(fields >> kind) || kind != "dirichlet") fail("expected 'BC dirichlet ...'");
            DirichletSpec bc;
            const auto pos = fields.tellg();
            if (!(fields >> where)) fail("expected 'all' or a plane 'a b c d'");
            if (where != "all") {
                fields.clear();
                fields.seekg(pos);
                Eigen::Vector4d plane;
                if (!(fields >> plane[0] >> plane[1] >> plane[2] >> plane[3])) {
                    fail("expected 'all' or a plane 'a b c d'");
                }
                bc.plane = plane;
            }
            const std::string expr = rest_of_line(fields);
            if (expr.empty()) fail("missing Dirichlet value expression");
            bc.value = compile(expr, line_no);
            bc.description = expr;
            net.dirichlet.push_back(bc);
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    if (net.fractures.empty()) throw ParseError("no fractures", line_no);

    for (std::size_t i = 0; i < source_text.size(); ++i) {
        net.sources.push_back(source_text[i].empty() ? Field3{} : compile(source_text[i], fracture_lines[i]));
    }
    const int n = static_cast<int>(net.fractures.size());
    try {
        if (raw_traces.empty()) {
            net.traces = compute_traces(net.fractures);
        }
    } catch (const InputError& err) {
        throw ParseError(err.what(), line_no);
    }
    for (const RawTrace& t : raw_traces) {
        if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n || t.i == t.j) {
            throw ParseError("trace references an invalid fracture pair", t.line);
        }
        try {
            net.traces.push_back(make_trace(static_cast<int>(net.traces.size()), net.fractures[t.i],
                                            net.fractures[t.j], t.a, t.b));
        } catch (const InputError& err) {
            throw ParseError(err.what(), t.line);
        }
    }
    try {
        validate_network(net);
    } catch (const ParseError&) {
        throw;
    } catch (const InputError& err) {
        throw ParseError(err.what(), line_no);
    }
    return net;
}

FractureNetwork read_network(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open network file " + path.string());
    return read_network(in, path.stem().string());
}

}  // namespace polyagg
