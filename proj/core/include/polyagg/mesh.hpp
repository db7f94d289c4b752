#pragma once

#include "polyagg/errors.hpp"
#include "polyagg/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace polyagg {

/// Default relative turn tolerance for collinearity tests (|cross| / (|a| |b|)).
inline constexpr double kCollinearTol = 1e-9;

struct Vertex {
    Vec2 position = Vec2::Zero();
    bool constrained = false;
};

struct Edge {
    std::array<int, 2> endpoints{-1, -1};  // stored with endpoints[0] < endpoints[1]
    bool constrained = false;
    std::array<int, 2> cells{-1, -1};

    int num_cells() const { return (cells[0] >= 0) + (cells[1] >= 0); }
    bool on_boundary() const { return num_cells() == 1; }
};

struct Cell {
    std::vector<int> boundary;  // counter-clockwise vertex ids
    double area = 0.0;
    Vec2 centroid = Vec2::Zero();
    double diameter = 0.0;
};

struct CellGeometry {
    double area;
    Vec2 centroid;
    double diameter;
};

/// Area, centroid and diameter of a simple polygon. Throws GeometryError on zero area.
CellGeometry cell_geometry(std::span<const Vec2> polygon);

class PolygonalMesh {
public:
    PolygonalMesh() = default;

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Cell>& cells() const { return cells_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    const Vec2& position(int v) const { return vertices_[v].position; }
    Polygon cell_polygon(int c) const;

    /// Edge ids of a cell in boundary order: entry i joins boundary[i] and boundary[i+1].
    std::span<const int> cell_edges(int c) const { return cell_edges_[c]; }

    /// Sorted ids of the cells adjacent to `c` (sharing an edge, none of the shared
    /// edges constrained).
    std::span<const int> neighbors(int c) const { return neighbors_[c]; }
    bool adjacent(int a, int b) const;

    /// Sorted ids of the cells whose boundary contains vertex `v`.
    std::span<const int> vertex_cells(int v) const { return vertex_cells_[v]; }
    int vertex_degree(int v) const { return vertex_degree_[v]; }

    std::optional<int> find_edge(int u, int v) const;

    /// Number of unordered adjacent cell pairs.
    std::size_t num_adjacencies() const { return num_adjacencies_; }

    /// Maximum cell diameter.
    double mesh_size() const { return mesh_size_; }
    double total_area() const;

    std::vector<std::array<int, 2>> constrained_edges() const;

    friend PolygonalMesh build_mesh(std::vector<Vertex> vertices,
                                    std::vector<std::vector<int>> cells,
                                    std::span<const std::array<int, 2>> constrained_edges);

private:
    static std::uint64_t key(int u, int v);

    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<Cell> cells_;
    std::vector<std::vector<int>> cell_edges_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<std::vector<int>> vertex_cells_;
    std::vector<int> vertex_degree_;
    std::unordered_map<std::uint64_t, int> edge_lookup_;
    std::size_t num_adjacencies_ = 0;
    double mesh_size_ = 0.0;
};

/// Builds and validates a mesh. Clockwise cells are reversed to counter-clockwise.
/// Endpoints of constrained edges are flagged as constrained vertices.
/// Throws MeshError naming the offending cell on dangling indices, non-simple or
/// degenerate polygons, overlapping cells and edges shared by more than two cells.
PolygonalMesh build_mesh(std::vector<Vertex> vertices, std::vector<std::vector<int>> cells,
                         std::span<const std::array<int, 2>> constrained_edges = {});

PolygonalMesh build_mesh(std::span<const Vec2> positions, std::vector<std::vector<int>> cells,
                         std::span<const std::array<int, 2>> constrained_edges = {});

/// Like build_mesh, but first drops vertices referenced by no cell and renumbers the rest.
PolygonalMesh build_compacted_mesh(const std::vector<Vertex>& vertices,
                                   const std::vector<std::vector<int>>& cells,
                                   std::span<const std::array<int, 2>> constrained_edges);

/// Partition of the boundary edges of a polygon (edge i joins vertex i and i+1) into
/// maximal chains of consecutive collinear edges.
std::vector<std::vector<int>> collinear_runs(std::span<const Vec2> polygon,
                                             double tol = kCollinearTol);

class MergeError : public GeometryError {
public:
    enum class Kind { disconnected, hole, pinched, constrained_interior };

    MergeError(Kind kind, const std::string& what) : GeometryError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Boolean union of an edge-connected set of cells. Shared edges are removed and the
/// outer loop traced counter-clockwise; vertices on the union boundary are kept.
/// Throws MergeError when the set is disconnected, the union has a hole or pinch vertex,
/// or a constrained edge or vertex would end up inside the union.
Cell merge_cells(const PolygonalMesh& mesh, std::span<const int> cell_ids);

/// Removes aligned vertices from a merged boundary as `simplify_aligned_edges` would once
/// the cells in `members` are replaced by their union.
std::vector<int> drop_aligned_vertices(const PolygonalMesh& mesh, std::span<const int> boundary,
                                       std::span<const int> members, double tol = kCollinearTol);

/// Removes every unconstrained vertex that has exactly two incident edges, touches no
/// constrained edge, and sits straight (within `tol`) between its two neighbors.
PolygonalMesh simplify_aligned_edges(const PolygonalMesh& mesh, double tol = kCollinearTol);

/// Ear-clipping triangulation of one cell, as vertex-id triples.
std::vector<std::array<int, 3>> triangulate_cell(const PolygonalMesh& mesh, int cell);

}  // namespace polyagg
