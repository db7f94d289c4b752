#pragma once

#include "polyagg/agglomerate.hpp"
#include "polyagg/mesh.hpp"
#include "polyagg/vem.hpp"

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polyagg {

using Field3 = std::function<double(const Vec3&)>;
using GradField3 = std::function<Vec3(const Vec3&)>;

/// Planar convex polygon in 3D with an orthonormal in-plane frame. The frame origin is the
/// first vertex, the first tangent follows the first edge and the normal follows the vertex
/// order, so the in-plane polygon is counter-clockwise.
struct Fracture {
    int id = 0;
    std::vector<Vec3> vertices;
    Vec3 origin = Vec3::Zero();
    Vec3 tangent_u = Vec3::UnitX();
    Vec3 tangent_v = Vec3::UnitY();
    Vec3 normal = Vec3::UnitZ();
    Eigen::Matrix2d K = Eigen::Matrix2d::Identity();  // in-plane transmissivity
    Polygon polygon;                                   // vertices in the frame

    Vec2 to_local(const Vec3& p) const;
    Vec3 to_global(const Vec2& p) const;
    double plane_distance(const Vec3& p) const { return normal.dot(p - origin); }
    double diameter() const;
    /// In-plane components of a 3D vector.
    Vec2 tangential(const Vec3& g) const { return {tangent_u.dot(g), tangent_v.dot(g)}; }
};

/// Throws InputError for fewer than three vertices, non-coplanar or non-convex input,
/// or a K that is not symmetric positive definite.
Fracture make_fracture(int id, std::vector<Vec3> vertices,
                       const Eigen::Matrix2d& K = Eigen::Matrix2d::Identity());

struct TraceSegment {
    int id = 0;
    std::array<int, 2> fractures{-1, -1};
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    std::array<std::array<Vec2, 2>, 2> local;  // local[s] = endpoints in fractures[s]'s frame

    double length() const { return (b - a).norm(); }
};

/// Intersection segments of every fracture pair with positive length. Throws InputError for
/// coplanar fractures whose polygons overlap.
std::vector<TraceSegment> compute_traces(std::span<const Fracture> fractures);

/// Builds a trace from explicit 3D endpoints; throws InputError if the segment leaves either
/// fracture.
TraceSegment make_trace(int id, const Fracture& fi, const Fracture& fj, const Vec3& a,
                        const Vec3& b);

/// Dirichlet data on boundary edges. Without a plane it applies to the whole boundary of the
/// selected fracture(s); with plane (a, b, c, d) it applies to edges lying on a x + b y + c z = d.
struct DirichletSpec {
    int fracture = -1;  // -1 means every fracture
    std::optional<Eigen::Vector4d> plane;
    Field3 value;
    std::string description;
};

struct FractureNetwork {
    std::string name;
    std::vector<Fracture> fractures;
    std::vector<TraceSegment> traces;
    std::vector<DirichletSpec> dirichlet;
    std::vector<Field3> sources;  // per fracture, empty entries mean zero
    // Optional exact solution per fracture, used for error norms.
    std::vector<Field3> exact;
    std::vector<GradField3> exact_gradient;

    bool has_exact() const { return !exact.empty(); }
    /// Bounding-box diagonal of all fracture vertices.
    double diameter() const;
};

/// Checks a nonempty Dirichlet boundary, that every fracture meets another (when there are
/// several), that traces lie on both of their fractures and that no trace also lies on a
/// third fracture. Throws InputError.
void validate_network(const FractureNetwork& network);

/// Three axis-aligned rectangles with a manufactured solution, Dirichlet data from it on the
/// whole boundary and the matching sources.
FractureNetwork network1();

/// Text format, one record per line ('#' starts a comment):
///   F n                      followed by n lines "x y z"
///   K kxx kxy kyy            in-plane tensor of the last fracture
///   S expr                   source of the last fracture
///   T i j x0 y0 z0 x1 y1 z1  explicit trace (when any is given, traces are not computed)
///   BC dirichlet all expr
///   BC dirichlet a b c d expr
/// Fractures are numbered from 0 in file order. Throws ParseError with the line number.
FractureNetwork read_network(std::istream& in, const std::string& name = "network");
FractureNetwork read_network(const std::filesystem::path& path);

struct MeshTarget {
    enum class Mode { area, count };
    Mode mode = Mode::area;
    double value = 1e-2;

    static MeshTarget max_area(double area) { return {Mode::area, area}; }
    static MeshTarget cells(int count) { return {Mode::count, static_cast<double>(count)}; }
};

/// Structured triangulation of a convex counter-clockwise polygon: a uniform grid over the
/// bounding box, each quad split into two triangles, clipped to the polygon. In area mode the
/// grid step is sqrt(area), so every triangle has area at most half the target; in count mode
/// the step is tuned until the triangle count is within 20% of the request.
PolygonalMesh triangulate_polygon(std::span<const Vec2> polygon, const MeshTarget& target);
PolygonalMesh triangulate_fracture(const Fracture& fracture, const MeshTarget& target);

/// Splits every cell crossed by a segment along the segment's line. Cells holding a segment
/// endpoint are split by the full chord with the endpoint inserted as a constrained vertex.
/// Chord pieces inside a segment become constrained edges. Cells of the input must be convex.
/// Throws InputError when a segment leaves the region covered by the mesh.
PolygonalMesh cut_by_traces(const PolygonalMesh& mesh, std::span<const std::array<Vec2, 2>> segments);

AgglomerationResult agglomerate_fracture(const PolygonalMesh& cut_mesh,
                                         const AgglomerationConfig& config);

/// Sorted parameters along [a, b] of the mesh vertices lying on that segment.
std::vector<double> trace_nodes(const PolygonalMesh& mesh, const Vec2& a, const Vec2& b,
                                double tol);

struct StitchedNetwork {
    std::vector<PolygonalMesh> meshes;
    std::vector<std::vector<int>> global_vertices;  // per fracture, per vertex
    int num_global_vertices = 0;
    int inserted_nodes = 0;
};

/// Inserts on both sides of every trace the union of the two node sets as hanging nodes, then
/// identifies coincident trace vertices across fractures. Throws MeshError when two distinct
/// nodes of one mesh match the same node of the other or a trace is not covered by edges.
StitchedNetwork stitch_conforming(const FractureNetwork& network,
                                  std::vector<PolygonalMesh> meshes);

struct NetworkMeshOptions {
    MeshTarget target;
    AgglomerationConfig agglomeration;
    int threads = 1;  // per-fracture workers; 0 reads POLYAGG_THREADS
};

struct FractureMeshInfo {
    int triangles = 0;
    ReductionStats stats;  // cut mesh versus agglomerated mesh
    std::vector<EnergyBreakdown> history;
    std::vector<std::string> warnings;
};

struct NetworkMesh {
    std::vector<PolygonalMesh> cut;  // before agglomeration
    StitchedNetwork stitched;
    std::vector<FractureMeshInfo> info;

    int num_cells() const;
    int num_cut_cells() const;
};

/// Triangulate, cut and agglomerate every fracture, then stitch.
NetworkMesh build_network_mesh(const FractureNetwork& network, const NetworkMeshOptions& options);

struct NetworkSystem {
    DofMap dofs;
    std::vector<std::vector<VemElement>> elements;  // per fracture
    std::vector<MeshBlock> blocks;
    SparseSpdSystem system;
};

NetworkSystem assemble_network(const FractureNetwork& network, const StitchedNetwork& mesh, int k);

struct FractureReport {
    int cells = 0;
    ErrorNorms errors;
    double max_pi_nabla = 0.0;
    double max_pi_0 = 0.0;
};

struct NetworkReport {
    int order = 1;
    int cells = 0;
    int dofs = 0;
    long nnz = 0;
    double cond = 0.0;
    bool cond_converged = false;
    double residual = 0.0;
    bool has_exact = false;
    /// Errors against the exact solution, or norms of the discrete solution when there is none.
    ErrorNorms errors;
    double max_pi_nabla = 0.0;
    double max_pi_0 = 0.0;
    std::vector<FractureReport> fractures;
};

struct NetworkSolution {
    NetworkSystem system;
    Eigen::VectorXd solution;
    NetworkReport report;
};

NetworkSolution solve_network(const FractureNetwork& network, const NetworkMesh& mesh, int k,
                              const VemOptions& options = {});

/// Worker count from POLYAGG_THREADS (at least 1), or `fallback` when unset or invalid.
int threads_from_environment(int fallback = 1);

}  // namespace polyagg
