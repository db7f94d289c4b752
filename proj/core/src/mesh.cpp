#include "polyagg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_set>

namespace polyagg {

CellGeometry cell_geometry(std::span<const Vec2> polygon)
{
    const double area = signed_area(polygon);
    const double d = diameter(polygon);
    if (!(std::abs(area) > 1e-14 * d * d)) {
        throw GeometryError("degenerate polygon with zero area");
    }
    return {std::abs(area), centroid(polygon), d};
}

Polygon PolygonalMesh::cell_polygon(int c) const
{
    Polygon poly;
    poly.reserve(cells_[c].boundary.size());
    for (int v : cells_[c].boundary) poly.push_back(vertices_[v].position);
    return poly;
}

bool PolygonalMesh::adjacent(int a, int b) const
{
    const auto& n = neighbors_[a];
    return std::binary_search(n.begin(), n.end(), b);
}

std::uint64_t PolygonalMesh::key(int u, int v)
{
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
}

std::optional<int> PolygonalMesh::find_edge(int u, int v) const
{
    auto it = edge_lookup_.find(key(u, v));
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

double PolygonalMesh::total_area() const
{
    double a = 0.0;
    for (const Cell& c : cells_) a += c.area;
    return a;
}

std::vector<std::array<int, 2>> PolygonalMesh::constrained_edges() const
{
    std::vector<std::array<int, 2>> out;
    for (const Edge& e : edges_) {
        if (e.constrained) out.push_back(e.endpoints);
    }
    return out;
}

PolygonalMesh build_mesh(std::vector<Vertex> vertices, std::vector<std::vector<int>> cells,
                         std::span<const std::array<int, 2>> constrained_edges)
{
    PolygonalMesh mesh;
    const int nv = static_cast<int>(vertices.size());
    for (int v = 0; v < nv; ++v) {
        if (!vertices[v].position.allFinite()) {
            throw MeshError("vertex " + std::to_string(v) + " has a non-finite position");
        }
    }

    mesh.cells_.resize(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const int c = static_cast<int>(ci);
        auto& b = cells[ci];
        if (b.size() < 3) {
            throw MeshError("cell " + std::to_string(c) + " has fewer than 3 vertices", c);
        }
        for (int v : b) {
            if (v < 0 || v >= nv) {
                throw MeshError("cell " + std::to_string(c) + " references missing vertex " +
                                    std::to_string(v),
                                c);
            }
        }
        std::vector<int> sorted = b;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw MeshError("cell " + std::to_string(c) + " repeats a vertex", c);
        }
        Polygon poly;
        for (int v : b) poly.push_back(vertices[v].position);
        if (signed_area(poly) < 0.0) {
            std::reverse(b.begin(), b.end());
            std::reverse(poly.begin(), poly.end());
        }
        CellGeometry g{};
        try {
            g = cell_geometry(poly);
        } catch (const GeometryError&) {
            throw MeshError("cell " + std::to_string(c) + " is degenerate (zero area)", c);
        }
        if (!is_simple(poly)) {
            throw MeshError("cell " + std::to_string(c) + " is not a simple polygon", c);
        }
        Cell& cell = mesh.cells_[ci];
        cell.boundary = std::move(b);
        cell.area = g.area;
        cell.centroid = g.centroid;
        cell.diameter = g.diameter;
        mesh.mesh_size_ = std::max(mesh.mesh_size_, g.diameter);
    }

    // Edge table; remember the direction each cell traverses an edge in.
    mesh.cell_edges_.resize(mesh.cells_.size());
    std::vector<std::array<int, 2>> first_direction;
    for (std::size_t ci = 0; ci < mesh.cells_.size(); ++ci) {
        const int c = static_cast<int>(ci);
        const auto& b = mesh.cells_[ci].boundary;
        const std::size_t n = b.size();
        mesh.cell_edges_[ci].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int u = b[i];
            const int v = b[(i + 1) % n];
            const auto k = PolygonalMesh::key(u, v);
            auto [it, inserted] = mesh.edge_lookup_.try_emplace(k, mesh.num_edges());
            if (inserted) {
                Edge e;
                e.endpoints = {std::min(u, v), std::max(u, v)};
                e.cells = {c, -1};
                mesh.edges_.push_back(e);
                first_direction.push_back({u, v});
            } else {
                Edge& e = mesh.edges_[it->second];
                if (e.cells[1] >= 0) {
                    throw MeshError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                        ") is shared by more than two cells",
                                    c);
                }
                if (first_direction[it->second][0] == u) {
                    throw MeshError("cell " + std::to_string(c) + " overlaps cell " +
                                        std::to_string(e.cells[0]),
                                    c);
                }
                e.cells[1] = c;
            }
            mesh.cell_edges_[ci].push_back(it->second);
        }
    }

    for (const auto& ce : constrained_edges) {
        auto id = mesh.find_edge(ce[0], ce[1]);
        if (!id) {
            throw MeshError("constrained edge (" + std::to_string(ce[0]) + "," +
                            std::to_string(ce[1]) + ") is not a mesh edge");
        }
        mesh.edges_[*id].constrained = true;
        vertices[ce[0]].constrained = true;
        vertices[ce[1]].constrained = true;
    }
    mesh.vertices_ = std::move(vertices);

    mesh.neighbors_.assign(mesh.cells_.size(), {});
    std::vector<std::vector<int>> blocked(mesh.cells_.size());
    for (const Edge& e : mesh.edges_) {
        if (e.num_cells() != 2) continue;
        auto& target = e.constrained ? blocked : mesh.neighbors_;
        target[e.cells[0]].push_back(e.cells[1]);
        target[e.cells[1]].push_back(e.cells[0]);
    }
    for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
        auto& n = mesh.neighbors_[c];
        auto& bl = blocked[c];
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
        std::sort(bl.begin(), bl.end());
        // Sharing any constrained edge makes two cells non-adjacent.
        std::vector<int> kept;
        std::set_difference(n.begin(), n.end(), bl.begin(), bl.end(), std::back_inserter(kept));
        n = std::move(kept);
        mesh.num_adjacencies_ += n.size();
    }
    mesh.num_adjacencies_ /= 2;

    mesh.vertex_cells_.assign(mesh.vertices_.size(), {});
    for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
        for (int v : mesh.cells_[c].boundary) mesh.vertex_cells_[v].push_back(static_cast<int>(c));
    }
    mesh.vertex_degree_.assign(mesh.vertices_.size(), 0);
    for (const Edge& e : mesh.edges_) {
        ++mesh.vertex_degree_[e.endpoints[0]];
        ++mesh.vertex_degree_[e.endpoints[1]];
    }
    return mesh;
}

PolygonalMesh build_mesh(std::span<const Vec2> positions, std::vector<std::vector<int>> cells,
                         std::span<const std::array<int, 2>> constrained_edges)
{
    std::vector<Vertex> vertices;
    vertices.reserve(positions.size());
    for (const Vec2& p : positions) vertices.push_back({p, false});
    return build_mesh(std::move(vertices), std::move(cells), constrained_edges);
}

PolygonalMesh build_compacted_mesh(const std::vector<Vertex>& vertices,
                                   const std::vector<std::vector<int>>& cells,
                                   std::span<const std::array<int, 2>> constrained_edges)
{
    std::vector<int> remap(vertices.size(), -1);
    std::vector<Vertex> kept;
    for (const auto& b : cells) {
        for (int v : b) {
            if (remap[v] < 0) {
                remap[v] = 0;
            }
        }
    }
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        if (remap[v] == 0) {
            remap[v] = static_cast<int>(kept.size());
            kept.push_back(vertices[v]);
        }
    }
    std::vector<std::vector<int>> new_cells = cells;
    for (auto& b : new_cells) {
        for (int& v : b) v = remap[v];
    }
    std::vector<std::array<int, 2>> new_constrained;
    for (const auto& e : constrained_edges) {
        if (remap[e[0]] >= 0 && remap[e[1]] >= 0) {
            new_constrained.push_back({remap[e[0]], remap[e[1]]});
        }
    }
    return build_mesh(std::move(kept), std::move(new_cells), new_constrained);
}

std::vector<std::vector<int>> collinear_runs(std::span<const Vec2> polygon, double tol)
{
    const int n = static_cast<int>(polygon.size());
    // straight[i]: edges i-1 and i continue straight through vertex i.
    std::vector<bool> straight(n);
    int start = -1;
    for (int i = 0; i < n; ++i) {
        straight[i] = is_straight(polygon[(i + n - 1) % n], polygon[i], polygon[(i + 1) % n], tol);
        if (!straight[i] && start < 0) start = i;
    }
    std::vector<std::vector<int>> runs;
    if (start < 0) {
        // Cannot happen for a valid polygon; treat every edge as its own run.
        for (int i = 0; i < n; ++i) runs.push_back({i});
        return runs;
    }
    for (int s = 0; s < n; ++s) {
        const int v = (start + s) % n;
        if (!straight[v] || runs.empty()) {
            runs.push_back({});
        }
        runs.back().push_back(v);  // edge v joins vertex v and v+1
    }
    return runs;
}

Cell merge_cells(const PolygonalMesh& mesh, std::span<const int> cell_ids)
{
    if (cell_ids.empty()) {
        throw MergeError(MergeError::Kind::disconnected, "cannot merge an empty cell set");
    }
    if (cell_ids.size() == 1) {
        return mesh.cells()[cell_ids[0]];
    }
    std::vector<int> members(cell_ids.begin(), cell_ids.end());
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    auto is_member = [&](int c) { return std::binary_search(members.begin(), members.end(), c); };

    // Edge-connectivity through the adjacency graph.
    {
        std::queue<int> q;
        q.push(members[0]);
        std::unordered_set<int> visited{members[0]};
        while (!q.empty()) {
            const int c = q.front();
            q.pop();
            for (int nb : mesh.neighbors(c)) {
                if (is_member(nb) && visited.insert(nb).second) q.push(nb);
            }
        }
        if (visited.size() != members.size()) {
            throw MergeError(MergeError::Kind::disconnected, "cell set is not edge-connected");
        }
    }

    // Half-edges on the union boundary, in the order the member cells list them.
    std::vector<std::array<int, 2>> half;
    std::unordered_map<int, int> next;
    for (int c : members) {
        const auto& b = mesh.cells()[c].boundary;
        const auto edges = mesh.cell_edges(c);
        for (std::size_t i = 0; i < b.size(); ++i) {
            const Edge& e = mesh.edges()[edges[i]];
            const int other = e.cells[0] == c ? e.cells[1] : e.cells[0];
            if (other >= 0 && is_member(other)) {
                if (e.constrained) {
                    throw MergeError(MergeError::Kind::constrained_interior,
                                     "a constrained edge would become interior");
                }
                continue;
            }
            const int u = b[i];
            const int v = b[(i + 1) % b.size()];
            if (!next.emplace(u, v).second) {
                throw MergeError(MergeError::Kind::pinched,
                                 "union boundary touches itself at vertex " + std::to_string(u));
            }
            half.push_back({u, v});
        }
    }
    if (half.empty()) {
        throw MergeError(MergeError::Kind::hole, "union has no boundary");
    }

    std::vector<int> loop;
    const int start = half.front()[0];
    int cur = start;
    do {
        loop.push_back(cur);
        auto it = next.find(cur);
        if (it == next.end() || loop.size() > half.size()) {
            throw MergeError(MergeError::Kind::hole, "union boundary is not a closed loop");
        }
        cur = it->second;
    } while (cur != start);
    if (loop.size() != half.size()) {
        throw MergeError(MergeError::Kind::hole, "union encloses a hole");
    }

    std::unordered_set<int> on_loop(loop.begin(), loop.end());
    for (int c : members) {
        for (int v : mesh.cells()[c].boundary) {
            if (mesh.vertices()[v].constrained && !on_loop.count(v)) {
                throw MergeError(MergeError::Kind::constrained_interior,
                                 "constrained vertex " + std::to_string(v) +
                                     " would become interior");
            }
        }
    }

    Cell cell;
    cell.boundary = std::move(loop);
    Polygon poly;
    for (int v : cell.boundary) poly.push_back(mesh.position(v));
    if (signed_area(poly) <= 0.0) {
        throw MergeError(MergeError::Kind::hole, "union boundary is not counter-clockwise");
    }
    const CellGeometry g = cell_geometry(poly);
    cell.area = g.area;
    cell.centroid = g.centroid;
    cell.diameter = g.diameter;
    return cell;
}

namespace {

std::vector<bool> touches_constrained_edge(const PolygonalMesh& mesh)
{
    std::vector<bool> t(mesh.num_vertices(), false);
    for (const Edge& e : mesh.edges()) {
        if (e.constrained) {
            t[e.endpoints[0]] = true;
            t[e.endpoints[1]] = true;
        }
    }
    return t;
}

}  // namespace

std::vector<int> drop_aligned_vertices(const PolygonalMesh& mesh, std::span<const int> boundary,
                                       std::span<const int> members, double tol)
{
    const std::size_t n = boundary.size();
    std::vector<int> kept;
    kept.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int v = boundary[i];
        bool removable = !mesh.vertices()[v].constrained;
        if (removable) {
            for (int c : mesh.vertex_cells(v)) {
                if (std::find(members.begin(), members.end(), c) == members.end()) {
                    removable = false;
                    break;
                }
            }
        }
        if (removable) {
            // Incident constrained edges pin the vertex even when the union swallows them.
            for (int c : mesh.vertex_cells(v)) {
                const auto& b = mesh.cells()[c].boundary;
                const auto edges = mesh.cell_edges(c);
                for (std::size_t j = 0; j < b.size() && removable; ++j) {
                    if ((b[j] == v || b[(j + 1) % b.size()] == v) &&
                        mesh.edges()[edges[j]].constrained) {
                        removable = false;
                    }
                }
            }
        }
        if (removable) {
            removable = is_straight(mesh.position(boundary[(i + n - 1) % n]), mesh.position(v),
                                    mesh.position(boundary[(i + 1) % n]), tol);
        }
        if (!removable) kept.push_back(v);
    }
    if (kept.size() < 3) return {boundary.begin(), boundary.end()};
    return kept;
}

PolygonalMesh simplify_aligned_edges(const PolygonalMesh& mesh, double tol)
{
    const auto pinned = touches_constrained_edge(mesh);
    std::vector<bool> remove(mesh.num_vertices(), false);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& b = mesh.cells()[c].boundary;
        const std::size_t n = b.size();
        for (std::size_t i = 0; i < n; ++i) {
            const int v = b[i];
            if (mesh.vertices()[v].constrained || pinned[v] || mesh.vertex_degree(v) != 2) continue;
            if (is_straight(mesh.position(b[(i + n - 1) % n]), mesh.position(v),
                            mesh.position(b[(i + 1) % n]), tol)) {
                remove[v] = true;
            }
        }
    }
    // A cell must keep at least three corners; restore its vertices otherwise.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Cell& cell : mesh.cells()) {
            std::size_t left = 0;
            for (int v : cell.boundary) left += !remove[v];
            if (left < 3) {
                for (int v : cell.boundary) {
                    if (remove[v]) {
                        remove[v] = false;
                        changed = true;
                    }
                }
            }
        }
    }
    std::vector<std::vector<int>> cells;
    cells.reserve(mesh.num_cells());
    for (const Cell& cell : mesh.cells()) {
        std::vector<int> b;
        for (int v : cell.boundary) {
            if (!remove[v]) b.push_back(v);
        }
        cells.push_back(std::move(b));
    }
    return build_compacted_mesh(mesh.vertices(), cells, mesh.constrained_edges());
}

std::vector<std::array<int, 3>> triangulate_cell(const PolygonalMesh& mesh, int cell)
{
    const auto& b = mesh.cells()[cell].boundary;
    auto tris = triangulate(mesh.cell_polygon(cell));
    for (auto& t : tris) {
        for (int& v : t) v = b[v];
    }
    return tris;
}

}  // namespace polyagg
