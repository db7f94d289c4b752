#pragma once

#include "report.hpp"

#include "polyagg/agglomerate.hpp"
#include "polyagg/dfn.hpp"
#include "polyagg/mesh.hpp"
#include "polyagg/quality.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace polyagg::cli {

enum class Format { csv, json };

struct GlobalOptions {
    std::filesystem::path out = ".";
    Format format = Format::csv;
    bool vtk = true;
    /// Worker threads for independent runs; 0 reads POLYAGG_THREADS (default 1).
    int threads = 0;
};

/// A mesh file, or `builtin:unit-square:<max area>` for a triangulated unit square.
struct NamedMesh {
    std::string id;
    PolygonalMesh mesh;
};
NamedMesh load_mesh(const std::string& source);

/// A network file, or `builtin:network1`.
FractureNetwork load_network(const std::string& source);

struct QualityOptions {
    std::string mesh;
};
QualityReport run_quality(const QualityOptions& opt, const GlobalOptions& global, std::ostream& log);

struct AgglomerateOptions {
    std::string mesh;
    double lambda = 0.25;
    SmoothnessMode sc_mode = SmoothnessMode::potts;
    int max_cycles = 50;
};
AgglomerationResult run_agglomerate(const AgglomerateOptions& opt, const GlobalOptions& global,
                                    std::ostream& log);

struct SolveOptions {
    std::string mesh;
    std::string solution = "sin-product";
    int order = 1;
    double lambda = 0.0;
    bool condition = true;
};
ReportRow run_solve(const SolveOptions& opt, const GlobalOptions& global, std::ostream& log);

struct DfnOptions {
    std::string network = "builtin:network1";
    std::vector<double> areas;  // maximum triangle areas
    std::vector<int> cells;     // target triangle counts
    std::vector<double> lambdas{0.0};
    std::vector<int> orders{1};
    bool condition = true;
};
std::vector<ReportRow> run_dfn(const DfnOptions& opt, const GlobalOptions& global, std::ostream& log);

struct ConvergenceOptions {
    std::string network;             // either a network with mesh targets
    std::vector<double> areas;
    std::vector<int> cells;
    std::vector<std::string> meshes; // or a mesh family with a manufactured solution
    std::string solution = "sin-product";
    std::vector<double> lambdas{0.0};
    std::vector<int> orders{1};
    bool condition = false;
};
struct ConvergenceResult {
    std::vector<ReportRow> rows;
    std::vector<RateRow> rates;
};
ConvergenceResult run_convergence(const ConvergenceOptions& opt, const GlobalOptions& global,
                                  std::ostream& log);

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace polyagg::cli
