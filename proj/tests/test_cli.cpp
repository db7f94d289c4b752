#include "catalog.hpp"
#include "commands.hpp"
#include "report.hpp"

#include "polyagg/mesh_io.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace polyagg;
using namespace polyagg::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("polyagg_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string(POLYAGG_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Report, CsvRoundTripIsExact)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1e3, 1e3);
    std::vector<ReportRow> rows;
    for (int i = 0; i < 20; ++i) {
        ReportRow r;
        r.mesh = i % 3 == 0 ? "odd,\"name\"" : "mesh" + std::to_string(i);
        r.k = 1 + i % 3;
        r.lambda = std::abs(U(rng)) / 1e3;
        r.dofs = i * 17;
        r.cells = i * 5;
        r.err_l2 = std::exp(U(rng) / 50);
        r.err_h1 = U(rng) * 1e-7;
        r.nnz = 1000000L * i;
        r.cond = 1.0 / 3.0 * i;
        r.max_pi_nabla = std::ldexp(1.0, -50 - i);
        r.max_pi_0 = U(rng);
        r.energy_before = 9000000000LL + i;
        r.energy_after = -i;
        r.h = std::sqrt(2.0) / (i + 1);
        r.wall_time = U(rng);
        rows.push_back(r);
    }
    std::stringstream ss;
    write_report_csv(ss, rows);
    const std::vector<ReportRow> back = read_report_csv(ss);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ReportRow& a = rows[i];
        const ReportRow& b = back[i];
        EXPECT_EQ(a.mesh, b.mesh);
        EXPECT_EQ(a.k, b.k);
        EXPECT_EQ(a.lambda, b.lambda);
        EXPECT_EQ(a.dofs, b.dofs);
        EXPECT_EQ(a.cells, b.cells);
        EXPECT_EQ(a.err_l2, b.err_l2);
        EXPECT_EQ(a.err_h1, b.err_h1);
        EXPECT_EQ(a.nnz, b.nnz);
        EXPECT_EQ(a.cond, b.cond);
        EXPECT_EQ(a.max_pi_nabla, b.max_pi_nabla);
        EXPECT_EQ(a.max_pi_0, b.max_pi_0);
        EXPECT_EQ(a.energy_before, b.energy_before);
        EXPECT_EQ(a.energy_after, b.energy_after);
        EXPECT_EQ(a.h, b.h);
        EXPECT_EQ(a.wall_time, b.wall_time);
    }
    std::stringstream again;
    write_report_csv(again, back);
    EXPECT_EQ(again.str(), ss.str());
}

TEST(Report, CsvRejectsMalformedRows)
{
    std::stringstream header;
    write_report_csv(header, {});
    std::stringstream bad(header.str() + "m,1,0,10,5\n");
    EXPECT_THROW(read_report_csv(bad), ParseError);
    std::stringstream bad_number(header.str() + "m,one,0,1,1,0,0,0,0,0,0,0,0,0,0\n");
    EXPECT_THROW(read_report_csv(bad_number), ParseError);
    std::stringstream wrong_header("a,b\n");
    EXPECT_THROW(read_report_csv(wrong_header), ParseError);
}

TEST(Report, LogLogSlope)
{
    const std::vector<double> h{0.4, 0.2, 0.1, 0.05};
    std::vector<double> e;
    for (double x : h) e.push_back(3.0 * std::pow(x, 2.5));
    EXPECT_NEAR(log_log_slope(h, e), 2.5, 1e-12);
    EXPECT_THROW(log_log_slope({1.0}, {1.0}), InputError);
    EXPECT_THROW(log_log_slope({1.0, 1.0}, {1.0, 2.0}), InputError);
    EXPECT_THROW(log_log_slope({1.0, 2.0}, {0.0, 2.0}), InputError);

    ReportRow ref;
    ref.k = 2;
    ref.dofs = 400;
    ref.err_l2 = 1e-3;
    ref.err_h1 = 1e-2;
    // A quarter of the DOFs doubles h: errors grow by 2^(k+1) and 2^k.
    const ExpectedErrors ex = expected_errors(ref, 100);
    EXPECT_NEAR(ex.l2, 8e-3, 1e-15);
    EXPECT_NEAR(ex.h1, 4e-2, 1e-15);
}

TEST(Catalog, SourcesAndGradientsMatchSolutions)
{
    const double h = 1e-4;
    for (const ManufacturedSolution& s : solution_catalog()) {
        for (const Vec2 p : {Vec2(0.3, 0.7), Vec2(0.81, 0.12), Vec2(0.5, 0.5)}) {
            const Vec2 ex(h, 0), ey(0, h);
            const Vec2 fd((s.u(p + ex) - s.u(p - ex)) / (2 * h), (s.u(p + ey) - s.u(p - ey)) / (2 * h));
            EXPECT_NEAR((fd - s.grad(p)).norm(), 0.0, 1e-7) << s.id;
            const double lap = (s.u(p + ex) + s.u(p - ex) + s.u(p + ey) + s.u(p - ey) - 4 * s.u(p)) / (h * h);
            EXPECT_NEAR(-lap, s.f(p), 1e-5) << s.id;
        }
    }
    EXPECT_THROW(find_solution("nope"), InputError);
}

TEST(Commands, QualityOfSquareGrid)
{
    const fs::path dir = scratch_dir("quality");
    write_mesh(dir / "grid.mesh", fixtures::quad_mesh(4, 4, 0, 1, 0, 1));
    GlobalOptions global;
    global.out = dir;
    std::ostringstream log;
    run_quality({(dir / "grid.mesh").string()}, global, log);
    std::ifstream in(dir / "grid_quality.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "cell_id,rho1,rho2,rho3,rho4,rho");
    int rows = 0;
    while (std::getline(in, line)) {
        const double rho = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_NEAR(rho, 0.905005852869941, 1e-12);
        ++rows;
    }
    EXPECT_EQ(rows, 16);
    EXPECT_TRUE(fs::exists(dir / "grid_quality.vtk"));
}

TEST(Commands, AgglomerateOutputs)
{
    const fs::path dir = scratch_dir("agglomerate");
    GlobalOptions global;
    global.out = dir;
    std::ostringstream log;
    AgglomerateOptions opt;
    opt.mesh = "builtin:unit-square:0.01";
    opt.lambda = 0.0;
    const AgglomerationResult none = run_agglomerate(opt, global, log);
    EXPECT_EQ(read_mesh(dir / "unit-square-0.01_agglomerated.mesh").num_cells(), none.stats.cells_before);

    opt.lambda = 1.0;
    const AgglomerationResult full = run_agglomerate(opt, global, log);
    const PolygonalMesh out = read_mesh(dir / "unit-square-0.01_agglomerated.mesh");
    EXPECT_EQ(out.num_cells(), full.stats.cells_after);
    const double reduction = 1.0 - static_cast<double>(full.stats.cells_after) / full.stats.cells_before;
    EXPECT_GE(reduction, 0.6);
    EXPECT_LE(reduction, 0.8);

    std::ifstream energy(dir / "unit-square-0.01_energy.csv");
    std::string line;
    std::getline(energy, line);
    EXPECT_EQ(line, "cycle,data,smooth,total");
    long long previous = std::numeric_limits<long long>::max();
    int cycles = 0;
    while (std::getline(energy, line)) {
        const long long total = std::stoll(line.substr(line.rfind(',') + 1));
        EXPECT_LE(total, previous);
        previous = total;
        ++cycles;
    }
    EXPECT_GE(cycles, 2);
    EXPECT_NE(log.str().find("saved"), std::string::npos);
}

TEST(Commands, SolvePatchTests)
{
    const fs::path dir = scratch_dir("solve");
    GlobalOptions global;
    global.out = dir;
    global.vtk = false;
    std::ostringstream log;
    for (int k = 1; k <= 3; ++k) {
        for (double lambda : {0.0, 1.0}) {
            SolveOptions opt;
            opt.mesh = "builtin:unit-square:0.05";
            opt.solution = "poly" + std::to_string(k);
            opt.order = k;
            opt.lambda = lambda;
            const ReportRow row = run_solve(opt, global, log);
            EXPECT_LT(row.err_l2, 1e-10) << k;
            EXPECT_LT(row.err_h1, 1e-10) << k;
            EXPECT_GT(row.nnz, 0);
            EXPECT_GT(row.cond, 1.0);
            if (lambda > 0) {
                EXPECT_LT(row.energy_after, row.energy_before);
            }
        }
    }
    std::ifstream in(dir / "unit-square-0.05_poly3_k3.csv");
    const std::vector<ReportRow> rows = read_report_csv(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].k, 3);
}

TEST(Commands, SinProductConvergence)
{
    const fs::path dir = scratch_dir("convergence");
    GlobalOptions global;
    global.out = dir;
    global.vtk = false;
    std::ostringstream log;
    ConvergenceOptions opt;
    opt.meshes = {"builtin:unit-square:0.02", "builtin:unit-square:0.005", "builtin:unit-square:0.00125"};
    opt.orders = {1, 2};
    opt.lambdas = {1.0};
    const ConvergenceResult res = run_convergence(opt, global, log);
    EXPECT_EQ(res.rows.size(), 12u);  // lambda = 0 added for the reference errors
    ASSERT_EQ(res.rates.size(), 4u);
    for (const RateRow& r : res.rates) {
        EXPECT_EQ(r.points, 3);
        EXPECT_NEAR(r.h1_vs_h, r.k, 0.15) << r.lambda << " " << r.k;
        EXPECT_NEAR(r.l2_vs_h, r.k + 1, 0.2) << r.lambda << " " << r.k;
    }
    EXPECT_TRUE(fs::exists(dir / "sin-product_convergence_expected.csv"));

    opt.meshes.pop_back();
    EXPECT_THROW(run_convergence(opt, global, log), InputError);
}

TEST(Commands, DfnReportsAndFiles)
{
    const fs::path dir = scratch_dir("dfn");
    GlobalOptions global;
    global.out = dir;
    global.threads = 2;
    std::ostringstream log;
    DfnOptions opt;
    opt.areas = {0.1};
    opt.lambdas = {0.0, 1.0};
    opt.orders = {1, 2};
    const std::vector<ReportRow> rows = run_dfn(opt, global, log);
    ASSERT_EQ(rows.size(), 4u);
    int vtk = 0;
    for (const auto& entry : fs::directory_iterator(dir)) vtk += entry.path().extension() == ".vtk";
    EXPECT_EQ(vtk, 12);  // three fractures per row

    // DOF counts agree with an independent numbering of the same meshes.
    const FractureNetwork net = network1();
    for (const ReportRow& r : rows) {
        NetworkMeshOptions mo;
        mo.target = MeshTarget::max_area(0.1);
        mo.agglomeration.lambda = r.lambda;
        const NetworkMesh mesh = build_network_mesh(net, mo);
        std::vector<const PolygonalMesh*> ptrs;
        for (const PolygonalMesh& m : mesh.stitched.meshes) ptrs.push_back(&m);
        EXPECT_EQ(r.dofs, build_dof_map(ptrs, mesh.stitched.global_vertices, r.k).num_dofs());
        EXPECT_EQ(r.cells, mesh.num_cells());
    }

    // Identical inputs give identical reports apart from timings.
    auto strip_times = [](const fs::path& p) {
        std::ifstream in(p);
        std::vector<ReportRow> rows = read_report_csv(in);
        for (ReportRow& r : rows) r.wall_time = 0.0;
        std::stringstream ss;
        write_report_csv(ss, rows);
        return ss.str();
    };
    const std::string first = strip_times(dir / "network1_report.csv");
    global.threads = 1;
    global.vtk = false;
    run_dfn(opt, global, log);
    EXPECT_EQ(strip_times(dir / "network1_report.csv"), first);
}

TEST(Tool, ExitCodes)
{
    const fs::path dir = scratch_dir("tool");
    std::ofstream(dir / "bad.mesh") << "V 3\n0 0\n1 0\n";
    std::ofstream(dir / "empty.mesh") << "V 0\nC 0\n";
    const std::string out = " --out " + dir.string();
    EXPECT_EQ(run_tool("quality builtin:unit-square:0.1" + out), 0);
    EXPECT_EQ(run_tool("quality " + (dir / "bad.mesh").string() + out), 2);
    EXPECT_EQ(run_tool("quality " + (dir / "empty.mesh").string() + out), 2);
    EXPECT_EQ(run_tool("quality " + (dir / "missing.mesh").string() + out), 2);
    EXPECT_EQ(run_tool("solve builtin:unit-square:0.1 --order 4" + out), 2);
    EXPECT_EQ(run_tool("solve builtin:unit-square:0.1 --solution nope" + out), 2);
    EXPECT_EQ(run_tool("agglomerate builtin:unit-square:0.1 --lambda 2" + out), 2);
    EXPECT_EQ(run_tool("dfn-solve --network builtin:nothing --area 0.1" + out), 2);
    EXPECT_EQ(run_tool("dfn-solve --area 5" + out), 2);
    EXPECT_EQ(run_tool("convergence --network builtin:network1 --area 0.1,0.05" + out), 2);
    EXPECT_EQ(run_tool("frobnicate"), 2);
    EXPECT_EQ(run_tool("--help"), 0);
    EXPECT_EQ(run_tool("--format json --no-vtk dfn-solve --area 0.1 -k 1" + out), 0);
    EXPECT_TRUE(fs::exists(dir / "network1_report.json"));
}
