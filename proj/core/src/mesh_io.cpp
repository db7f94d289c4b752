#include "polyagg/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace polyagg {

namespace {

struct LineReader {
    std::istream& in;
    int line_no = 0;

    // Next non-empty line with comments stripped; false at end of input.
    bool next(std::istringstream& fields)
    {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            fields.clear();
            fields.str(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no); }
};

int read_header(LineReader& reader, std::istringstream& fields, char tag)
{
    std::string t;
    long long count = -1;
    if (!(fields >> t) || t.size() != 1 || t[0] != tag || !(fields >> count) || count < 0) {
        reader.fail(std::string("expected '") + tag + " <count>'");
    }
    std::string extra;
    if (fields >> extra) reader.fail("unexpected token '" + extra + "'");
    return static_cast<int>(count);
}

}  // namespace

PolygonalMesh read_mesh(std::istream& in)
{
    LineReader reader{in};
    std::istringstream fields;

    if (!reader.next(fields)) reader.fail("empty mesh file");
    const int nv = read_header(reader, fields, 'V');
    std::vector<Vertex> vertices(nv);
    for (int i = 0; i < nv; ++i) {
        if (!reader.next(fields)) reader.fail("unexpected end of file in vertex block");
        double x = 0, y = 0;
        if (!(fields >> x >> y)) reader.fail("expected vertex coordinates 'x y [c]'");
        int c = 0;
        if (fields >> c) {
            if (c != 0 && c != 1) reader.fail("constraint flag must be 0 or 1");
        } else if (!fields.eof()) {
            reader.fail("malformed constraint flag");
        }
        std::string extra;
        fields.clear();
        if (fields >> extra) reader.fail("unexpected token '" + extra + "'");
        vertices[i] = {Vec2(x, y), c == 1};
    }

    if (!reader.next(fields)) reader.fail("missing cell block 'C <count>'");
    const int nc = read_header(reader, fields, 'C');
    if (nc == 0) reader.fail("mesh has no cells");
    std::vector<std::vector<int>> cells(nc);
    for (int i = 0; i < nc; ++i) {
        if (!reader.next(fields)) reader.fail("unexpected end of file in cell block");
        long long v = 0;
        while (fields >> v) {
            if (v < 0 || v >= nv) reader.fail("vertex index " + std::to_string(v) + " out of range");
            cells[i].push_back(static_cast<int>(v));
        }
        if (!fields.eof()) reader.fail("malformed vertex index");
        if (cells[i].size() < 3) reader.fail("cell needs at least 3 vertices");
    }

    std::vector<std::array<int, 2>> constrained;
    if (reader.next(fields)) {
        const int ne = read_header(reader, fields, 'E');
        for (int i = 0; i < ne; ++i) {
            if (!reader.next(fields)) reader.fail("unexpected end of file in edge block");
            long long a = -1, b = -1;
            if (!(fields >> a >> b)) reader.fail("expected edge endpoints 'a b'");
            if (a < 0 || a >= nv || b < 0 || b >= nv) reader.fail("edge endpoint out of range");
            constrained.push_back({static_cast<int>(a), static_cast<int>(b)});
        }
        if (reader.next(fields)) reader.fail("trailing content after edge block");
    }

    try {
        return build_mesh(std::move(vertices), std::move(cells), constrained);
    } catch (const MeshError& e) {
        throw MeshError(std::string("invalid mesh: ") + e.what(), e.cell());
    }
}

PolygonalMesh read_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open mesh file " + path.string());
    return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolygonalMesh& mesh)
{
    out << std::setprecision(17);
    out << "V " << mesh.num_vertices() << '\n';
    for (const Vertex& v : mesh.vertices()) {
        out << v.position.x() << ' ' << v.position.y();
        if (v.constrained) out << " 1";
        out << '\n';
    }
    out << "C " << mesh.num_cells() << '\n';
    for (const Cell& c : mesh.cells()) {
        for (std::size_t i = 0; i < c.boundary.size(); ++i) {
            out << (i ? " " : "") << c.boundary[i];
        }
        out << '\n';
    }
    const auto constrained = mesh.constrained_edges();
    if (!constrained.empty()) {
        out << "E " << constrained.size() << '\n';
        for (const auto& e : constrained) out << e[0] << ' ' << e[1] << '\n';
    }
}

void write_mesh(const std::filesystem::path& path, const PolygonalMesh& mesh)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_mesh(out, mesh);
}

void write_vtk(std::ostream& out, const PolygonalMesh& mesh, const CellData& data,
               const Embedding& embed)
{
    out << "# vtk DataFile Version 3.0\npolyagg mesh\nASCII\nDATASET POLYDATA\n";
    out << std::setprecision(17);
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vertex& v : mesh.vertices()) {
        const Vec3 p = embed ? embed(v.position) : Vec3(v.position.x(), v.position.y(), 0.0);
        out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    std::size_t size = 0;
    for (const Cell& c : mesh.cells()) size += c.boundary.size() + 1;
    out << "POLYGONS " << mesh.num_cells() << ' ' << size << '\n';
    for (const Cell& c : mesh.cells()) {
        out << c.boundary.size();
        for (int v : c.boundary) out << ' ' << v;
        out << '\n';
    }
    if (!data.empty()) {
        out << "CELL_DATA " << mesh.num_cells() << '\n';
        for (const auto& [name, values] : data) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double x : values) out << x << '\n';
        }
    }
}

void write_vtk(const std::filesystem::path& path, const PolygonalMesh& mesh, const CellData& data,
               const Embedding& embed)
{
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_vtk(out, mesh, data, embed);
}

}  // namespace polyagg
