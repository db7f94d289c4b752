#include "polyagg/mesh.hpp"
#include "polyagg/mesh_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace polyagg;

TEST(Mesh, QuadGridTopology)
{
    const PolygonalMesh m = fixtures::quad_mesh(3, 2);
    EXPECT_EQ(m.num_cells(), 6);
    EXPECT_EQ(m.num_vertices(), 12);
    EXPECT_EQ(m.num_edges(), 17);
    EXPECT_EQ(m.num_adjacencies(), 7u);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
    const auto nb = m.neighbors(1);
    EXPECT_EQ(std::vector<int>(nb.begin(), nb.end()), (std::vector<int>{0, 2, 4}));
    EXPECT_TRUE(m.adjacent(0, 3));
    EXPECT_FALSE(m.adjacent(0, 4));  // corner contact only
}

TEST(Mesh, ClockwiseCellsAreReversed)
{
    const std::vector<Vec2> p{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const PolygonalMesh m = build_mesh(p, {{0, 3, 2, 1}});
    EXPECT_GT(signed_area(m.cell_polygon(0)), 0.0);
}

TEST(Mesh, RejectsInvalidInput)
{
    const std::vector<Vec2> p{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}};
    EXPECT_THROW(build_mesh(p, {{0, 1}}), MeshError);
    EXPECT_THROW(build_mesh(p, {{0, 1, 9}}), MeshError);
    EXPECT_THROW(build_mesh(p, {{0, 1, 1, 2}}), MeshError);
    EXPECT_THROW(build_mesh(p, {{0, 1, 4}}), MeshError);            // zero area
    EXPECT_THROW(build_mesh(p, {{0, 2, 1, 3}}), MeshError);         // bow tie
    EXPECT_THROW(build_mesh(p, {{0, 1, 2}, {0, 1, 3}}), MeshError); // overlap
    try {
        build_mesh(p, {{0, 1, 2}, {0, 1, 4}});
        FAIL();
    } catch (const MeshError& e) {
        EXPECT_EQ(e.cell(), 1);
    }
}

TEST(Mesh, ConstrainedEdgesBlockAdjacency)
{
    const std::vector<Vec2> p{{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}};
    const std::array<int, 2> c{1, 4};
    const PolygonalMesh m = build_mesh(p, {{0, 1, 4, 3}, {1, 2, 5, 4}}, std::span(&c, 1));
    EXPECT_FALSE(m.adjacent(0, 1));
    EXPECT_TRUE(m.vertices()[1].constrained);
    EXPECT_TRUE(m.vertices()[4].constrained);
    const std::array<int, 2> bad{0, 4};
    EXPECT_THROW(build_mesh(p, {{0, 1, 4, 3}}, std::span(&bad, 1)), MeshError);
}

TEST(Mesh, MergeTwoSquares)
{
    const PolygonalMesh m = fixtures::quad_mesh(2, 1);
    const int ids[] = {0, 1};
    const Cell merged = merge_cells(m, ids);
    EXPECT_EQ(merged.boundary.size(), 6u);
    EXPECT_NEAR(merged.area, 1.0, 1e-15);
    const auto dropped = drop_aligned_vertices(m, merged.boundary, ids);
    EXPECT_EQ(dropped.size(), 4u);
}

TEST(Mesh, MergeFailures)
{
    const PolygonalMesh m = fixtures::quad_mesh(3, 3);
    const int disconnected[] = {0, 2};
    EXPECT_THROW(merge_cells(m, disconnected), MergeError);
    const int ring[] = {0, 1, 2, 3, 5, 6, 7, 8};
    try {
        merge_cells(m, ring);
        FAIL();
    } catch (const MergeError& e) {
        EXPECT_EQ(e.kind(), MergeError::Kind::hole);
    }
    const int ell[] = {0, 1, 4};
    EXPECT_NO_THROW(merge_cells(m, ell));
    // Cells 1 and 3 meet at a single vertex, connected around the far side of the grid.
    const int pinch[] = {1, 2, 3, 5, 6, 7, 8};
    try {
        merge_cells(m, pinch);
        FAIL();
    } catch (const MergeError& e) {
        EXPECT_EQ(e.kind(), MergeError::Kind::pinched);
    }
}

TEST(Mesh, MergeUShape)
{
    const PolygonalMesh m = fixtures::quad_mesh(3, 2);
    // Layout: 0 1 2 bottom, 3 4 5 top.
    const int u[] = {0, 1, 2, 3, 5};
    const Cell c = merge_cells(m, u);
    EXPECT_NEAR(c.area, 5.0 / 6.0, 1e-15);
    const int diag[] = {1, 3};
    EXPECT_THROW(merge_cells(m, diag), MergeError);
}

TEST(Mesh, MergeRefusesConstrainedInterior)
{
    const std::vector<Vec2> p{{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}};
    const std::array<int, 2> c{1, 4};
    const PolygonalMesh m = build_mesh(p, {{0, 1, 4, 3}, {1, 2, 5, 4}}, std::span(&c, 1));
    const int ids[] = {0, 1};
    EXPECT_THROW(merge_cells(m, ids), MergeError);
}

TEST(Mesh, SimplifyRemovesHangingNodes)
{
    const PolygonalMesh m = fixtures::quad_mesh(2, 1);
    const int ids[] = {0, 1};
    const Cell merged = merge_cells(m, ids);
    std::vector<Vertex> verts = m.vertices();
    const PolygonalMesh one = build_compacted_mesh(verts, {merged.boundary}, {});
    EXPECT_EQ(one.num_vertices(), 6);
    const PolygonalMesh s = simplify_aligned_edges(one);
    EXPECT_EQ(s.num_vertices(), 4);
    EXPECT_EQ(s.num_edges(), 4);
    EXPECT_NEAR(s.total_area(), 1.0, 1e-15);
}

TEST(Mesh, SimplifyKeepsConstrainedVertices)
{
    const std::vector<Vertex> v{{{0, 0}, false}, {{0.5, 0}, true}, {{1, 0}, false},
                                {{1, 1}, false}, {{0, 1}, false}};
    const PolygonalMesh m = build_mesh(v, {{0, 1, 2, 3, 4}});
    EXPECT_EQ(simplify_aligned_edges(m).num_vertices(), 5);
}

TEST(Mesh, CollinearRuns)
{
    const Polygon p{{0, 0}, {0.25, 0}, {2, 0}, {2, 1}, {0, 1}};
    const auto runs = collinear_runs(p);
    ASSERT_EQ(runs.size(), 4u);
    std::size_t longest = 0;
    for (const auto& r : runs) longest = std::max(longest, r.size());
    EXPECT_EQ(longest, 2u);
}

TEST(MeshIo, RoundTrip)
{
    const std::vector<Vertex> v{{{0, 0}, false}, {{1, 0}, false}, {{2, 0}, false},
                                {{0, 1}, false}, {{1, 1}, false}, {{2, 1}, false}};
    const std::array<int, 2> c{1, 4};
    const PolygonalMesh m = build_mesh(v, {{0, 1, 4, 3}, {1, 2, 5, 4}}, std::span(&c, 1));
    std::stringstream ss;
    write_mesh(ss, m);
    const PolygonalMesh r = read_mesh(ss);
    EXPECT_EQ(r.num_cells(), 2);
    EXPECT_EQ(r.num_vertices(), 6);
    EXPECT_EQ(r.constrained_edges().size(), 1u);
    EXPECT_FALSE(r.adjacent(0, 1));
    for (int i = 0; i < 6; ++i) EXPECT_EQ(r.position(i), m.position(i));
}

TEST(MeshIo, ParseErrorsCarryLineNumbers)
{
    std::istringstream in("V 3\n0 0\n1 0\n1 x\nC 1\n0 1 2\n");
    try {
        read_mesh(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    std::istringstream empty("V 3\n0 0\n1 0\n0 1\nC 0\n");
    EXPECT_THROW(read_mesh(empty), InputError);
}

TEST(MeshIo, VtkOutput)
{
    const PolygonalMesh m = fixtures::quad_mesh(2, 1);
    std::stringstream ss;
    write_vtk(ss, m, {{"rho", {0.5, 0.25}}});
    const std::string s = ss.str();
    EXPECT_NE(s.find("POLYGONS 2 10"), std::string::npos);
    EXPECT_NE(s.find("SCALARS rho double"), std::string::npos);
}
