#include "catalog.hpp"
#include "commands.hpp"

#include "polyagg/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace polyagg;
using namespace polyagg::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Polygonal mesh agglomeration and virtual element solver"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    std::string out_dir = ".";
    bool no_vtk = false;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    std::string format = "csv";
    app.add_option("--format", format, "Report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_flag("--no-vtk", no_vtk, "Skip VTK output");

    QualityOptions qopt;
    auto* quality_cmd = app.add_subcommand("quality", "Per-cell quality indicators of a mesh");
    quality_cmd->add_option("mesh", qopt.mesh, "Mesh file or builtin:unit-square:<area>")->required();

    AgglomerateOptions aopt;
    std::string sc_mode = "potts";
    auto* agg_cmd = app.add_subcommand("agglomerate", "Merge cells by graph-cut energy minimization");
    agg_cmd->add_option("mesh", aopt.mesh, "Mesh file or builtin:unit-square:<area>")->required();
    agg_cmd->add_option("--lambda", aopt.lambda, "Smoothness weight")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    agg_cmd->add_option("--sc-mode", sc_mode, "Smoothness cost")
        ->check(CLI::IsMember({"literal", "potts"}))
        ->capture_default_str();
    agg_cmd->add_option("--max-cycles", aopt.max_cycles, "Swap cycle limit")->check(CLI::PositiveNumber)->capture_default_str();

    SolveOptions sopt;
    bool solve_no_cond = false;
    std::string catalog_ids;
    for (const auto& s : solution_catalog()) catalog_ids += (catalog_ids.empty() ? "" : ", ") + s.id;
    auto* solve_cmd = app.add_subcommand("solve", "Poisson solve with a manufactured solution on one mesh");
    solve_cmd->add_option("mesh", sopt.mesh, "Mesh file or builtin:unit-square:<area>")->required();
    solve_cmd->add_option("--order,-k", sopt.order, "VEM order")->check(CLI::Range(1, 3))->capture_default_str();
    solve_cmd->add_option("--solution", sopt.solution, "One of " + catalog_ids)->capture_default_str();
    solve_cmd->add_option("--lambda", sopt.lambda, "Agglomerate first with this weight")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    solve_cmd->add_flag("--no-cond", solve_no_cond, "Skip the condition number estimate");

    DfnOptions dopt;
    bool dfn_no_cond = false;
    auto* dfn_cmd = app.add_subcommand("dfn-solve", "Mesh, agglomerate and solve a fracture network");
    dfn_cmd->add_option("--network", dopt.network, "Network file or builtin:network1")->capture_default_str();
    auto* dfn_area = dfn_cmd->add_option("--area", dopt.areas, "Maximum triangle area (list)")->delimiter(',');
    auto* dfn_cells = dfn_cmd->add_option("--cells", dopt.cells, "Target triangles per fracture (list)")->delimiter(',');
    dfn_area->excludes(dfn_cells);
    dfn_cmd->add_option("--lambda", dopt.lambdas, "Smoothness weights (list)")->delimiter(',')->capture_default_str();
    dfn_cmd->add_option("--order,-k", dopt.orders, "VEM orders (list)")->delimiter(',')->capture_default_str();
    dfn_cmd->add_flag("--no-cond", dfn_no_cond, "Skip the condition number estimate");

    ConvergenceOptions copt;
    bool conv_cond = false;
    auto* conv_cmd = app.add_subcommand("convergence", "Convergence rates over a refinement family");
    auto* conv_net = conv_cmd->add_option("--network", copt.network, "Network file or builtin:network1");
    auto* conv_mesh = conv_cmd->add_option("--mesh", copt.meshes, "Mesh family (at least 3)")->delimiter(',');
    conv_net->excludes(conv_mesh);
    conv_cmd->add_option("--area", copt.areas, "Maximum triangle areas for a network")->delimiter(',');
    conv_cmd->add_option("--cells", copt.cells, "Target triangle counts for a network")->delimiter(',');
    conv_cmd->add_option("--solution", copt.solution, "Manufactured solution for a mesh family")->capture_default_str();
    conv_cmd->add_option("--lambda", copt.lambdas, "Smoothness weights (list)")->delimiter(',')->capture_default_str();
    conv_cmd->add_option("--order,-k", copt.orders, "VEM orders (list)")->delimiter(',')->capture_default_str();
    conv_cmd->add_flag("--cond", conv_cond, "Estimate condition numbers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    global.out = out_dir;
    global.format = format == "json" ? Format::json : Format::csv;
    global.vtk = !no_vtk;
    try {
        if (*quality_cmd) {
            run_quality(qopt, global, std::cout);
        } else if (*agg_cmd) {
            aopt.sc_mode = parse_smoothness_mode(sc_mode);
            run_agglomerate(aopt, global, std::cout);
        } else if (*solve_cmd) {
            sopt.condition = !solve_no_cond;
            run_solve(sopt, global, std::cout);
        } else if (*dfn_cmd) {
            dopt.condition = !dfn_no_cond;
            run_dfn(dopt, global, std::cout);
        } else if (*conv_cmd) {
            copt.condition = conv_cond;
            run_convergence(copt, global, std::cout);
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
