#include "polyagg/dfn.hpp"

#include "polyagg/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

namespace polyagg {

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

void check_convex_polygon(std::span<const Vec2> polygon)
{
    if (polygon.size() < 3 || signed_area(polygon) <= 0.0 || !is_convex(polygon)) {
        throw InputError("triangulation needs a convex counter-clockwise polygon");
    }
}

// Merges points closer than `tol`, looking at neighboring buckets so points straddling a
// bucket boundary are still found.
class Welder {
public:
    explicit Welder(double tol) : tol_(tol) {}

    int id(const Vec2& p)
    {
        const long long kx = std::llround(p.x() / tol_);
        const long long ky = std::llround(p.y() / tol_);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = buckets_.find(key(kx + dx, ky + dy));
                if (it == buckets_.end()) continue;
                for (int v : it->second) {
                    if ((points_[v] - p).norm() <= tol_) return v;
                }
            }
        }
        const int v = static_cast<int>(points_.size());
        points_.push_back(p);
        buckets_[key(kx, ky)].push_back(v);
        return v;
    }

    const std::vector<Vec2>& points() const { return points_; }

private:
    static std::uint64_t key(long long x, long long y)
    {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    }

    double tol_;
    std::vector<Vec2> points_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

PolygonalMesh grid_triangulation(std::span<const Vec2> polygon, double step)
{
    const BoundingBox box = bounding_box(polygon);
    const Vec2 size = box.hi - box.lo;
    const double nx_real = std::ceil(size.x() / step - 1e-9);
    const double ny_real = std::ceil(size.y() / step - 1e-9);
    if (!(nx_real * ny_real < 2.5e7)) throw InputError("mesh target is too fine");
    const int nx = std::max(1, static_cast<int>(nx_real));
    const int ny = std::max(1, static_cast<int>(ny_real));
    const double dx = size.x() / nx;
    const double dy = size.y() / ny;
    const double diag = size.norm();
    const double tol = 1e-10 * diag;

    Welder welder(1e-9 * diag);
    std::vector<std::vector<int>> cells;
    auto node = [&](int i, int j) { return Vec2(box.lo.x() + i * dx, box.lo.y() + j * dy); };
    auto emit = [&](std::span<const Vec2> piece) {
        std::vector<int> ids;
        for (const Vec2& p : piece) {
            const int v = welder.id(p);
            if (ids.empty() || ids.back() != v) ids.push_back(v);
        }
        while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
        if (ids.size() < 3) return;
        if (ids.size() == 3) {
            cells.push_back(ids);
            return;
        }
        Polygon welded;
        for (int v : ids) welded.push_back(welder.points()[v]);
        for (const auto& t : triangulate(welded)) cells.push_back({ids[t[0]], ids[t[1]], ids[t[2]]});
    };

    const std::size_t m = polygon.size();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 p00 = node(i, j), p10 = node(i + 1, j), p11 = node(i + 1, j + 1), p01 = node(i, j + 1);
            for (const std::array<Vec2, 3>& tri : {std::array<Vec2, 3>{p00, p10, p11}, std::array<Vec2, 3>{p00, p11, p01}}) {
                if (inside_convex(polygon, tri[0], tol) && inside_convex(polygon, tri[1], tol) &&
                    inside_convex(polygon, tri[2], tol)) {
                    emit(tri);
                    continue;
                }
                Polygon piece(tri.begin(), tri.end());
                for (std::size_t e = 0; e < m && piece.size() >= 3; ++e) {
                    piece = clip_half_plane(piece, polygon[e], polygon[(e + 1) % m]);
                }
                if (piece.size() < 3 || signed_area(piece) <= 1e-12 * dx * dy) continue;
                emit(piece);
            }
        }
    }
    std::vector<Vertex> vertices;
    for (const Vec2& p : welder.points()) vertices.push_back({p, false});
    return build_compacted_mesh(vertices, cells, {});
}

}  // namespace

PolygonalMesh triangulate_polygon(std::span<const Vec2> polygon, const MeshTarget& target)
{
    check_convex_polygon(polygon);
    const double area = signed_area(polygon);
    if (!(target.value > 0.0) || !std::isfinite(target.value)) {
        throw InputError("mesh target must be positive");
    }
    if (target.mode == MeshTarget::Mode::area) {
        if (target.value > area) {
            throw InputError("target area " + std::to_string(target.value) +
                             " is too coarse to cover a polygon of area " + std::to_string(area));
        }
        return grid_triangulation(polygon, std::sqrt(target.value));
    }

    const double wanted = std::round(target.value);
    if (wanted < 1.0) throw InputError("triangle count must be at least 1");
    double step = std::sqrt(2.0 * area / wanted);
    PolygonalMesh best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        PolygonalMesh mesh = grid_triangulation(polygon, step);
        const double count = mesh.num_cells();
        const double gap = std::abs(count - wanted);
        if (gap < best_gap) {
            best_gap = gap;
            best = std::move(mesh);
        }
        if (best_gap <= 0.2 * wanted) return best;
        // Counts move in jumps; a damped and slightly jittered update avoids cycling.
        step *= std::pow(count / wanted, 0.5) * (1.0 + 0.013 * ((it % 3) - 1));
    }
    throw InputError("cannot reach " + std::to_string(static_cast<long long>(wanted)) +
                     " triangles within 20%");
}

PolygonalMesh triangulate_fracture(const Fracture& fracture, const MeshTarget& target)
{
    return triangulate_polygon(fracture.polygon, target);
}

namespace {

std::pair<int, int> ordered(int u, int v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

// Mutable vertex/loop representation used while cutting and stitching.
class EditableMesh {
public:
    explicit EditableMesh(const PolygonalMesh& mesh)
    {
        verts_ = mesh.vertices();
        vertex_cells_.resize(verts_.size());
        for (int c = 0; c < mesh.num_cells(); ++c) add_cell(mesh.cells()[c].boundary);
        for (const auto& e : mesh.constrained_edges()) constrained_.insert(ordered(e[0], e[1]));
    }

    const std::vector<Vertex>& vertices() const { return verts_; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    const Vec2& position(int v) const { return verts_[v].position; }

    int add_vertex(const Vec2& p, bool constrained)
    {
        verts_.push_back({p, constrained});
        vertex_cells_.emplace_back();
        return static_cast<int>(verts_.size()) - 1;
    }

    void mark_vertex(int v) { verts_[v].constrained = true; }
    void constrain(int u, int v) { constrained_.insert(ordered(u, v)); }

    int add_cell(std::vector<int> loop)
    {
        cells_.emplace_back();
        const int c = num_cells() - 1;
        set_cell(c, std::move(loop));
        return c;
    }

    void set_cell(int c, std::vector<int> loop)
    {
        for (int v : cells_[c]) {
            auto& list = vertex_cells_[v];
            list.erase(std::remove(list.begin(), list.end(), c), list.end());
        }
        cells_[c] = std::move(loop);
        for (int v : cells_[c]) {
            auto& list = vertex_cells_[v];
            if (std::find(list.begin(), list.end(), c) == list.end()) list.push_back(c);
        }
    }

    // True when some cell has u and v as consecutive boundary vertices.
    bool has_edge(int u, int v) const
    {
        for (int c : vertex_cells_[u]) {
            const auto& loop = cells_[c];
            const std::size_t n = loop.size();
            for (std::size_t i = 0; i < n; ++i) {
                const int a = loop[i], b = loop[(i + 1) % n];
                if ((a == u && b == v) || (a == v && b == u)) return true;
            }
        }
        return false;
    }

    // Inserts `chain` (ordered from u to v) between u and v in every cell containing the edge.
    void insert_on_edge(int u, int v, std::span<const int> chain)
    {
        const std::vector<int> candidates = vertex_cells_[u];
        for (int c : candidates) {
            std::vector<int> loop = cells_[c];
            const std::size_t n = loop.size();
            for (std::size_t i = 0; i < n; ++i) {
                const int a = loop[i], b = loop[(i + 1) % n];
                if (a == u && b == v) {
                    loop.insert(loop.begin() + i + 1, chain.begin(), chain.end());
                } else if (a == v && b == u) {
                    loop.insert(loop.begin() + i + 1, chain.rbegin(), chain.rend());
                } else {
                    continue;
                }
                set_cell(c, std::move(loop));
                break;
            }
        }
        if (constrained_.erase(ordered(u, v))) {
            int prev = u;
            for (int w : chain) {
                constrained_.insert(ordered(prev, w));
                prev = w;
            }
            constrained_.insert(ordered(prev, v));
        }
    }

    PolygonalMesh build() const
    {
        std::vector<std::array<int, 2>> edges;
        for (const auto& [u, v] : constrained_) edges.push_back({u, v});
        return build_mesh(verts_, cells_, edges);
    }

private:
    std::vector<Vertex> verts_;
    std::vector<std::vector<int>> cells_;
    std::vector<std::vector<int>> vertex_cells_;
    std::set<std::pair<int, int>> constrained_;
};

class SegmentCutter {
public:
    SegmentCutter(EditableMesh& mesh, const Vec2& p, const Vec2& q, double tol)
        : mesh_(mesh), p_(p), q_(q), tol_(tol)
    {
        length_ = (q - p).norm();
        dir_ = (q - p) / length_;
        ttol_ = tol / length_;
    }

    void run()
    {
        const int endpoint_p = locate_endpoint(p_);
        const int endpoint_q = locate_endpoint(q_);
        endpoint_[0] = endpoint_p;
        endpoint_[1] = endpoint_q;
        const int existing = mesh_.num_cells();
        for (int c = 0; c < existing; ++c) cut_cell(c);
        for (const auto& [edge, w] : pending_) {
            const int chain[1] = {w};
            mesh_.insert_on_edge(edge.first, edge.second, chain);
        }
        if (endpoint_[0] < 0 || endpoint_[1] < 0) {
            throw InputError("trace segment leaves the meshed region");
        }
    }

private:
    double param(const Vec2& x) const { return (x - p_).dot(dir_) / length_; }
    double side(const Vec2& x) const { return cross(dir_, x - p_); }

    // Snaps an endpoint to a vertex or splits the edge it lies on; -1 when it is inside a
    // cell (the chord step inserts it then).
    int locate_endpoint(const Vec2& e)
    {
        const auto& verts = mesh_.vertices();
        for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
            if ((verts[v].position - e).norm() <= tol_) {
                mesh_.mark_vertex(v);
                return v;
            }
        }
        for (const auto& loop : mesh_.cells()) {
            const std::size_t n = loop.size();
            for (std::size_t i = 0; i < n; ++i) {
                const int u = loop[i], v = loop[(i + 1) % n];
                const Vec2 a = mesh_.position(u);
                const Vec2 ab = mesh_.position(v) - a;
                const double len = ab.norm();
                const double s = (e - a).dot(ab) / (len * len);
                if (s <= 0.0 || s >= 1.0) continue;
                if (std::abs(cross(ab, e - a)) / len > tol_) continue;
                const int w = mesh_.add_vertex(e, true);
                const int chain[1] = {w};
                mesh_.insert_on_edge(u, v, chain);
                return w;
            }
        }
        return -1;
    }

    int crossing_vertex(int u, int v, const Vec2& x)
    {
        const auto key = ordered(u, v);
        auto it = pending_.find(key);
        if (it != pending_.end()) return it->second;
        const int w = mesh_.add_vertex(x, false);
        pending_.emplace(key, w);
        return w;
    }

    void cut_cell(int c)
    {
        const std::vector<int> loop = mesh_.cells()[c];
        const int n = static_cast<int>(loop.size());
        std::vector<double> s(n);
        std::vector<int> sign(n);
        bool pos = false, neg = false;
        for (int i = 0; i < n; ++i) {
            s[i] = side(mesh_.position(loop[i]));
            sign[i] = std::abs(s[i]) <= tol_ ? 0 : (s[i] > 0.0 ? 1 : -1);
            pos |= sign[i] > 0;
            neg |= sign[i] < 0;
        }
        if (!(pos && neg)) {
            // The line may run along edges of this cell.
            for (int i = 0; i < n; ++i) {
                const int j = (i + 1) % n;
                if (sign[i] != 0 || sign[j] != 0) continue;
                const double mid = 0.5 * (param(mesh_.position(loop[i])) + param(mesh_.position(loop[j])));
                if (mid > 0.0 && mid < 1.0) mesh_.constrain(loop[i], loop[j]);
            }
            return;
        }

        struct Crossing {
            int after;    // position in `loop`
            bool at_vertex;
            Vec2 x;
        };
        std::vector<Crossing> crossings;
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            if (sign[i] == 0) {
                crossings.push_back({i, true, mesh_.position(loop[i])});
            } else if (sign[j] != 0 && sign[i] != sign[j]) {
                const Vec2& a = mesh_.position(loop[i]);
                const Vec2& b = mesh_.position(loop[j]);
                crossings.push_back({i, false, a + (b - a) * (s[i] / (s[i] - s[j]))});
            }
        }
        if (crossings.size() != 2) {
            throw GeometryError("cell " + std::to_string(c) + " is not convex; cannot cut it");
        }
        const double t0 = param(crossings[0].x);
        const double t1 = param(crossings[1].x);
        const double lo = std::min(t0, t1), hi = std::max(t0, t1);
        if (hi <= ttol_ || lo >= 1.0 - ttol_) return;

        std::vector<int> loop2;
        int pa = -1, pb = -1;
        int ca = -1, cb = -1;
        for (int i = 0; i < n; ++i) {
            loop2.push_back(loop[i]);
            for (int k = 0; k < 2; ++k) {
                if (crossings[k].after != i) continue;
                int vid = loop[i];
                if (!crossings[k].at_vertex) {
                    vid = crossing_vertex(loop[i], loop[(i + 1) % n], crossings[k].x);
                    loop2.push_back(vid);
                }
                (k == 0 ? pa : pb) = static_cast<int>(loop2.size()) - 1;
                (k == 0 ? ca : cb) = vid;
            }
        }

        // Segment endpoints strictly inside the chord, ordered from crossing 0 to crossing 1.
        std::vector<std::pair<double, int>> interior;
        for (int k = 0; k < 2; ++k) {
            const double t = static_cast<double>(k);
            if (t <= lo + ttol_ || t >= hi - ttol_) continue;
            if (endpoint_[k] < 0) endpoint_[k] = mesh_.add_vertex(k == 0 ? p_ : q_, true);
            interior.emplace_back(t, endpoint_[k]);
        }
        std::sort(interior.begin(), interior.end());
        if (t0 > t1) std::reverse(interior.begin(), interior.end());

        const int m = static_cast<int>(loop2.size());
        std::vector<int> piece1, piece2;
        for (int i = pa;; i = (i + 1) % m) {
            piece1.push_back(loop2[i]);
            if (i == pb) break;
        }
        for (auto it = interior.rbegin(); it != interior.rend(); ++it) piece1.push_back(it->second);
        for (int i = pb;; i = (i + 1) % m) {
            piece2.push_back(loop2[i]);
            if (i == pa) break;
        }
        for (const auto& item : interior) piece2.push_back(item.second);

        std::vector<std::pair<double, int>> chord{{t0, ca}};
        chord.insert(chord.end(), interior.begin(), interior.end());
        chord.emplace_back(t1, cb);
        for (std::size_t i = 0; i + 1 < chord.size(); ++i) {
            const double mid = 0.5 * (chord[i].first + chord[i + 1].first);
            if (mid > 0.0 && mid < 1.0) mesh_.constrain(chord[i].second, chord[i + 1].second);
        }
        mesh_.set_cell(c, std::move(piece1));
        mesh_.add_cell(std::move(piece2));
    }

    EditableMesh& mesh_;
    Vec2 p_, q_, dir_;
    double tol_, ttol_, length_ = 0.0;
    std::array<int, 2> endpoint_{-1, -1};
    std::map<std::pair<int, int>, int> pending_;
};

}  // namespace

PolygonalMesh cut_by_traces(const PolygonalMesh& mesh, std::span<const std::array<Vec2, 2>> segments)
{
    if (mesh.num_cells() == 0) throw InputError("cannot cut an empty mesh");
    Polygon all;
    for (const Vertex& v : mesh.vertices()) all.push_back(v.position);
    const BoundingBox box = bounding_box(all);
    const double tol = 1e-10 * (box.hi - box.lo).norm();

    EditableMesh editable(mesh);
    for (const auto& seg : segments) {
        if ((seg[1] - seg[0]).norm() <= tol) throw InputError("trace segment of zero length");
        SegmentCutter(editable, seg[0], seg[1], tol).run();
    }
    return editable.build();
}

AgglomerationResult agglomerate_fracture(const PolygonalMesh& cut_mesh, const AgglomerationConfig& config)
{
    return agglomerate(cut_mesh, config);
}

std::vector<double> trace_nodes(const PolygonalMesh& mesh, const Vec2& a, const Vec2& b, double tol)
{
    const Vec2 d = b - a;
    const double len = d.norm();
    std::vector<double> ts;
    for (const Vertex& v : mesh.vertices()) {
        const Vec2 r = v.position - a;
        if (std::abs(cross(d, r)) / len > tol) continue;
        const double t = r.dot(d) / (len * len);
        if (t < -tol / len || t > 1.0 + tol / len) continue;
        ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    return ts;
}

StitchedNetwork stitch_conforming(const FractureNetwork& network, std::vector<PolygonalMesh> meshes)
{
    const int nf = static_cast<int>(network.fractures.size());
    if (static_cast<int>(meshes.size()) != nf) throw InputError("one mesh per fracture expected");
    const double tol = 1e-9 * network.diameter();

    std::vector<EditableMesh> editable;
    editable.reserve(nf);
    for (const PolygonalMesh& m : meshes) editable.emplace_back(m);

    StitchedNetwork out;
    std::vector<std::array<std::pair<int, int>, 2>> matches;  // ((fracture, vertex), (fracture, vertex))

    for (const TraceSegment& trace : network.traces) {
        const std::string name = "trace " + std::to_string(trace.id);
        const double len = trace.length();
        const double ttol = tol / len;

        std::array<std::vector<std::pair<double, int>>, 2> nodes;
        for (int s = 0; s < 2; ++s) {
            const EditableMesh& em = editable[trace.fractures[s]];
            const Vec2 a = trace.local[s][0];
            const Vec2 d = trace.local[s][1] - a;
            for (int v = 0; v < static_cast<int>(em.vertices().size()); ++v) {
                const Vec2 r = em.position(v) - a;
                if (std::abs(cross(d, r)) / len > tol) continue;
                const double t = r.dot(d) / (len * len);
                if (t < -ttol || t > 1.0 + ttol) continue;
                nodes[s].emplace_back(t, v);
            }
            std::sort(nodes[s].begin(), nodes[s].end());
            for (std::size_t i = 0; i + 1 < nodes[s].size(); ++i) {
                if (nodes[s][i + 1].first - nodes[s][i].first <= ttol) {
                    throw MeshError(name + ": two nodes of fracture " +
                                    std::to_string(trace.fractures[s]) + " coincide");
                }
            }
            if (nodes[s].size() < 2 || nodes[s].front().first > ttol || nodes[s].back().first < 1.0 - ttol) {
                throw MeshError(name + ": endpoints missing from fracture " +
                                std::to_string(trace.fractures[s]));
            }
        }

        // Union of the two node sets, clustered within the tolerance.
        struct Cluster {
            double t;
            std::array<int, 2> vertex{-1, -1};
        };
        std::vector<std::tuple<double, int, int>> events;
        for (int s = 0; s < 2; ++s) {
            for (const auto& [t, v] : nodes[s]) events.emplace_back(t, s, v);
        }
        std::sort(events.begin(), events.end());
        std::vector<Cluster> clusters;
        for (const auto& [t, s, v] : events) {
            if (clusters.empty() || t - clusters.back().t > ttol) clusters.push_back({t, {-1, -1}});
            if (clusters.back().vertex[s] >= 0) {
                throw MeshError(name + ": ambiguous node matching in fracture " +
                                std::to_string(trace.fractures[s]));
            }
            clusters.back().vertex[s] = v;
        }

        for (Cluster& cl : clusters) {
            for (int s = 0; s < 2; ++s) {
                if (cl.vertex[s] >= 0) continue;
                EditableMesh& em = editable[trace.fractures[s]];
                auto& list = nodes[s];
                auto pos = std::lower_bound(list.begin(), list.end(), std::pair{cl.t, -1});
                if (pos == list.begin() || pos == list.end()) {
                    throw MeshError(name + ": node outside the trace in fracture " +
                                    std::to_string(trace.fractures[s]));
                }
                const int p = std::prev(pos)->second;
                const int q = pos->second;
                if (!em.has_edge(p, q)) {
                    throw MeshError(name + ": not covered by edges of fracture " +
                                    std::to_string(trace.fractures[s]));
                }
                const Vec2 x = trace.local[s][0] + cl.t * (trace.local[s][1] - trace.local[s][0]);
                const int w = em.add_vertex(x, true);
                const int chain[1] = {w};
                em.insert_on_edge(p, q, chain);
                list.insert(pos, {cl.t, w});
                cl.vertex[s] = w;
                ++out.inserted_nodes;
            }
            matches.push_back({std::pair{trace.fractures[0], cl.vertex[0]},
                               std::pair{trace.fractures[1], cl.vertex[1]}});
        }
    }

    std::vector<int> offset(nf + 1, 0);
    for (int f = 0; f < nf; ++f) {
        offset[f + 1] = offset[f] + static_cast<int>(editable[f].vertices().size());
    }
    std::vector<int> parent(offset[nf]);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& m : matches) {
        const int a = find(offset[m[0].first] + m[0].second);
        const int b = find(offset[m[1].first] + m[1].second);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> compact(offset[nf], -1);
    out.global_vertices.resize(nf);
    for (int f = 0; f < nf; ++f) {
        for (int v = 0; v < static_cast<int>(editable[f].vertices().size()); ++v) {
            const int root = find(offset[f] + v);
            if (compact[root] < 0) compact[root] = out.num_global_vertices++;
            out.global_vertices[f].push_back(compact[root]);
        }
        out.meshes.push_back(editable[f].build());
    }
    return out;
}

int threads_from_environment(int fallback)
{
    if (const char* env = std::getenv("POLYAGG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
    }
    return std::max(1, fallback);
}

int NetworkMesh::num_cells() const
{
    int n = 0;
    for (const PolygonalMesh& m : stitched.meshes) n += m.num_cells();
    return n;
}

int NetworkMesh::num_cut_cells() const
{
    int n = 0;
    for (const PolygonalMesh& m : cut) n += m.num_cells();
    return n;
}

NetworkMesh build_network_mesh(const FractureNetwork& network, const NetworkMeshOptions& options)
{
    validate_network(network);
    const int nf = static_cast<int>(network.fractures.size());
    NetworkMesh out;
    out.cut.resize(nf);
    out.info.resize(nf);
    std::vector<PolygonalMesh> agglomerated(nf);

    auto work = [&](int f) {
        const Fracture& fracture = network.fractures[f];
        std::vector<std::array<Vec2, 2>> segments;
        for (const TraceSegment& t : network.traces) {
            for (int s = 0; s < 2; ++s) {
                if (t.fractures[s] == f) segments.push_back(t.local[s]);
            }
        }
        const PolygonalMesh tri = triangulate_fracture(fracture, options.target);
        out.cut[f] = cut_by_traces(tri, segments);
        AgglomerationResult res = agglomerate_fracture(out.cut[f], options.agglomeration);
        out.info[f].triangles = tri.num_cells();
        out.info[f].stats = res.stats;
        out.info[f].history = std::move(res.history);
        out.info[f].warnings = std::move(res.warnings);
        agglomerated[f] = std::move(res.mesh);
    };

    const int threads = std::min(nf, options.threads > 0 ? options.threads : threads_from_environment());
    if (threads <= 1) {
        for (int f = 0; f < nf; ++f) work(f);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int f = next++; f < nf; f = next++) {
                    try {
                        work(f);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    out.stitched = stitch_conforming(network, std::move(agglomerated));
    return out;
}

}  // namespace polyagg
