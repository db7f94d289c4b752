#pragma once

#include "polyagg/mesh.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace polyagg {

/// Reads the text mesh format:
///   V n        followed by n lines `x y [c]` (c = 1 marks a constrained vertex)
///   C m        followed by m lines of counter-clockwise vertex indices
///   E k        (optional) followed by k constrained-edge index pairs
/// Tokens are whitespace separated; `#` starts a comment. Throws ParseError with the line
/// number on malformed input and MeshError on invalid geometry.
PolygonalMesh read_mesh(std::istream& in);
PolygonalMesh read_mesh(const std::filesystem::path& path);

void write_mesh(std::ostream& out, const PolygonalMesh& mesh);
void write_mesh(const std::filesystem::path& path, const PolygonalMesh& mesh);

using CellData = std::map<std::string, std::vector<double>>;
using Embedding = std::function<Vec3(const Vec2&)>;

/// Legacy ASCII VTK polydata with one polygon per cell and optional cell scalars.
/// `embed` maps planar coordinates into 3D (defaults to z = 0).
void write_vtk(std::ostream& out, const PolygonalMesh& mesh, const CellData& data = {},
               const Embedding& embed = {});
void write_vtk(const std::filesystem::path& path, const PolygonalMesh& mesh,
               const CellData& data = {}, const Embedding& embed = {});

}  // namespace polyagg
