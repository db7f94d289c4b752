#include "commands.hpp"

#include "catalog.hpp"

#include "polyagg/errors.hpp"
#include "polyagg/mesh_io.hpp"
#include "polyagg/quality.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace polyagg::cli {

namespace {

namespace fs = std::filesystem;

std::string short_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::ofstream open_output(const GlobalOptions& global, const std::string& name)
{
    fs::create_directories(global.out);
    const fs::path path = global.out / name;
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

std::string report_extension(const GlobalOptions& global)
{
    return global.format == Format::json ? ".json" : ".csv";
}

void write_rows(const GlobalOptions& global, const std::string& stem, const std::vector<ReportRow>& rows)
{
    std::ofstream out = open_output(global, stem + report_extension(global));
    if (global.format == Format::json) {
        write_report_json(out, rows);
    } else {
        write_report_csv(out, rows);
    }
}

int worker_count(const GlobalOptions& global)
{
    return global.threads > 0 ? global.threads : threads_from_environment(1);
}

// Runs jobs[0..n) on up to `threads` workers; the first exception is rethrown.
template <class Job>
void run_parallel(int n, int threads, Job job)
{
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(guard);
                    if (!failure) failure = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void check_lambda(double lambda)
{
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError("lambda must lie in [0, 1]");
}

void check_order(int k)
{
    if (k < 1 || k > 3) throw InputError("order must be 1, 2 or 3");
}

std::vector<double> cell_rho(const PolygonalMesh& mesh)
{
    std::vector<double> rho;
    for (int c = 0; c < mesh.num_cells(); ++c) rho.push_back(quality(mesh.cell_polygon(c)).rho);
    return rho;
}

struct PlanarRun {
    ReportRow row;
    PolygonalMesh mesh;
};

// Optional agglomeration followed by a single-mesh solve.
PlanarRun planar_run(const NamedMesh& input, const ManufacturedSolution& sol, int k, double lambda,
                     bool condition, const GlobalOptions& global)
{
    const auto start = std::chrono::steady_clock::now();
    PlanarRun run;
    run.row.mesh = input.id;
    run.row.k = k;
    run.row.lambda = lambda;
    run.mesh = input.mesh;
    if (lambda > 0.0) {
        AgglomerationConfig config;
        config.lambda = lambda;
        AgglomerationResult agg = agglomerate(input.mesh, config);
        run.row.energy_before = agg.stats.energy_before;
        run.row.energy_after = agg.stats.energy_after;
        run.mesh = std::move(agg.mesh);
    }
    VemOptions vo;
    vo.estimate_condition = condition;
    const VemReport rep = solve_poisson(run.mesh, poisson_problem(sol), k, vo);
    ReportRow& r = run.row;
    r.dofs = rep.dofs;
    r.cells = rep.cells;
    r.err_l2 = rep.errors.l2;
    r.err_h1 = rep.errors.h1;
    r.nnz = rep.nnz;
    r.cond = rep.cond;
    r.max_pi_nabla = rep.max_pi_nabla;
    r.max_pi_0 = rep.max_pi_0;
    r.h = run.mesh.mesh_size();
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (global.vtk) {
        const DofMap dofs = build_dof_map(run.mesh, k);
        const std::vector<VemElement> elements = build_elements(run.mesh, k);
        CellData data{{"solution", cell_values(elements, dofs, 0, rep.solution)}, {"rho", cell_rho(run.mesh)}};
        const std::string name = input.id + "_" + sol.id + "_l" +
                                 short_number(lambda) + "_k" + std::to_string(k) + ".vtk";
        fs::create_directories(global.out);
        write_vtk(global.out / name, run.mesh, data);
    }
    return run;
}

struct NetworkJob {
    MeshTarget target;
    double lambda;
};

std::string target_tag(const MeshTarget& t)
{
    return t.mode == MeshTarget::Mode::area ? "area=" + short_number(t.value)
                                            : "cells=" + std::to_string(static_cast<long>(t.value));
}

std::vector<NetworkJob> network_jobs(const std::vector<double>& areas, const std::vector<int>& cells,
                                     const std::vector<double>& lambdas)
{
    std::vector<MeshTarget> targets;
    for (double a : areas) targets.push_back(MeshTarget::max_area(a));
    for (int n : cells) targets.push_back(MeshTarget::cells(n));
    if (targets.empty()) throw InputError("a mesh target (--area or --cells) is required");
    std::vector<NetworkJob> jobs;
    for (const MeshTarget& t : targets) {
        for (double lambda : lambdas) {
            check_lambda(lambda);
            jobs.push_back({t, lambda});
        }
    }
    return jobs;
}

// One mesh (target, lambda) of a network and a solve per order.
std::vector<ReportRow> network_runs(const FractureNetwork& net, const NetworkJob& job,
                                    const std::vector<int>& orders, bool condition, int fracture_threads,
                                    const GlobalOptions& global)
{
    const auto start = std::chrono::steady_clock::now();
    NetworkMeshOptions mo;
    mo.target = job.target;
    mo.agglomeration.lambda = job.lambda;
    mo.threads = fracture_threads;
    const NetworkMesh mesh = build_network_mesh(net, mo);
    const double mesh_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    long long e_before = 0, e_after = 0;
    for (const FractureMeshInfo& info : mesh.info) {
        e_before += info.stats.energy_before;
        e_after += info.stats.energy_after;
    }
    double h = 0.0;
    for (const PolygonalMesh& m : mesh.stitched.meshes) h = std::max(h, m.mesh_size());

    std::vector<ReportRow> rows;
    for (int k : orders) {
        const auto t0 = std::chrono::steady_clock::now();
        VemOptions vo;
        vo.estimate_condition = condition;
        const NetworkSolution sol = solve_network(net, mesh, k, vo);
        ReportRow r;
        r.mesh = net.name + "/" + target_tag(job.target);
        r.k = k;
        r.lambda = job.lambda;
        r.dofs = sol.report.dofs;
        r.cells = sol.report.cells;
        r.err_l2 = sol.report.errors.l2;
        r.err_h1 = sol.report.errors.h1;
        r.nnz = sol.report.nnz;
        r.cond = sol.report.cond;
        r.max_pi_nabla = sol.report.max_pi_nabla;
        r.max_pi_0 = sol.report.max_pi_0;
        r.energy_before = e_before;
        r.energy_after = e_after;
        r.h = h;
        r.wall_time = mesh_time + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(r);

        if (global.vtk) {
            fs::create_directories(global.out);
            for (std::size_t f = 0; f < net.fractures.size(); ++f) {
                const Fracture& fr = net.fractures[f];
                const PolygonalMesh& m = mesh.stitched.meshes[f];
                CellData data{
                    {"solution", cell_values(sol.system.elements[f], sol.system.dofs, static_cast<int>(f), sol.solution)},
                    {"rho", cell_rho(m)},
                    {"fracture", std::vector<double>(m.num_cells(), static_cast<double>(f))}};
                const std::string name = net.name + "_" + target_tag(job.target) + "_l" + short_number(job.lambda) +
                                         "_k" + std::to_string(k) + "_f" + std::to_string(f) + ".vtk";
                write_vtk(global.out / name, m, data, [&fr](const Vec2& p) { return fr.to_global(p); });
            }
        }
    }
    return rows;
}

std::vector<ReportRow> run_network_grid(const FractureNetwork& net, const std::vector<NetworkJob>& jobs,
                                        const std::vector<int>& orders, bool condition,
                                        const GlobalOptions& global)
{
    for (int k : orders) check_order(k);
    const int workers = worker_count(global);
    // Parallelism goes to independent runs when there are several, else to fractures.
    const int fracture_threads = jobs.size() > 1 ? 1 : workers;
    std::vector<std::vector<ReportRow>> results(jobs.size());
    run_parallel(static_cast<int>(jobs.size()), jobs.size() > 1 ? workers : 1, [&](int i) {
        results[i] = network_runs(net, jobs[i], orders, condition, fracture_threads, global);
    });
    std::vector<ReportRow> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    return rows;
}

void print_row(std::ostream& log, const ReportRow& r)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s k=%d lambda=%g cells=%d dofs=%d err_l2=%.3e err_h1=%.3e nnz=%ld cond=%.3e\n",
                  r.mesh.c_str(), r.k, r.lambda, r.cells, r.dofs, r.err_l2, r.err_h1, r.nnz, r.cond);
    log << buf;
}

}  // namespace

NamedMesh load_mesh(const std::string& source)
{
    const std::string prefix = "builtin:unit-square:";
    if (source.rfind(prefix, 0) == 0) {
        const std::string arg = source.substr(prefix.size());
        char* end = nullptr;
        const double area = std::strtod(arg.c_str(), &end);
        if (arg.empty() || *end != '\0') throw InputError("bad area in '" + source + "'");
        const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        return {"unit-square-" + arg, triangulate_polygon(square, MeshTarget::max_area(area))};
    }
    if (source.rfind("builtin:", 0) == 0) throw InputError("unknown builtin mesh '" + source + "'");
    if (!fs::exists(source)) throw InputError("mesh file not found: " + source);
    return {fs::path(source).stem().string(), read_mesh(fs::path(source))};
}

FractureNetwork load_network(const std::string& source)
{
    if (source == "builtin:network1") return network1();
    if (source.rfind("builtin:", 0) == 0) throw InputError("unknown builtin network '" + source + "'");
    if (!fs::exists(source)) throw InputError("network file not found: " + source);
    return read_network(fs::path(source));
}

QualityReport run_quality(const QualityOptions& opt, const GlobalOptions& global, std::ostream& log)
{
    const NamedMesh input = load_mesh(opt.mesh);
    const QualityReport report = mesh_quality_report(input.mesh);
    const std::string stem = input.id + "_quality";
    std::ofstream out = open_output(global, stem + report_extension(global));
    if (global.format == Format::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < report.cells.size(); ++c) {
            const QualityScores& q = report.cells[c];
            arr.push_back({{"cell_id", c}, {"rho1", q.rho1}, {"rho2", q.rho2}, {"rho3", q.rho3}, {"rho4", q.rho4},
                           {"rho", q.rho}});
        }
        out << arr.dump(2) << '\n';
    } else {
        out << "cell_id,rho1,rho2,rho3,rho4,rho\n";
        char buf[160];
        for (std::size_t c = 0; c < report.cells.size(); ++c) {
            const QualityScores& q = report.cells[c];
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", c, q.rho1, q.rho2, q.rho3, q.rho4,
                          q.rho);
            out << buf;
        }
    }
    if (global.vtk) {
        CellData data;
        for (const char* name : {"rho1", "rho2", "rho3", "rho4", "rho"}) data[name];
        for (const QualityScores& q : report.cells) {
            data["rho1"].push_back(q.rho1);
            data["rho2"].push_back(q.rho2);
            data["rho3"].push_back(q.rho3);
            data["rho4"].push_back(q.rho4);
            data["rho"].push_back(q.rho);
        }
        write_vtk(global.out / (stem + ".vtk"), input.mesh, data);
    }
    log << input.id << ": " << report.cells.size() << " cells, min rho " << report.min_rho << ", mean rho "
        << report.mean_rho << "\nrho histogram:";
    for (int count : report.histogram) log << ' ' << count;
    log << '\n';
    return report;
}

AgglomerationResult run_agglomerate(const AgglomerateOptions& opt, const GlobalOptions& global, std::ostream& log)
{
    check_lambda(opt.lambda);
    if (opt.max_cycles < 1) throw InputError("max-cycles must be positive");
    const NamedMesh input = load_mesh(opt.mesh);
    AgglomerationConfig config;
    config.lambda = opt.lambda;
    config.sc_mode = opt.sc_mode;
    config.max_cycles = opt.max_cycles;
    AgglomerationResult result = agglomerate(input.mesh, config);

    fs::create_directories(global.out);
    write_mesh(global.out / (input.id + "_agglomerated.mesh"), result.mesh);
    if (global.vtk) {
        write_vtk(global.out / (input.id + "_agglomerated.vtk"), result.mesh, {{"rho", cell_rho(result.mesh)}});
    }
    std::ofstream energy = open_output(global, input.id + "_energy" + report_extension(global));
    if (global.format == Format::json) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            const EnergyBreakdown& e = result.history[i];
            arr.push_back({{"cycle", i}, {"data", e.data_term}, {"smooth", e.smooth_term}, {"total", e.total}});
        }
        energy << arr.dump(2) << '\n';
    } else {
        energy << "cycle,data,smooth,total\n";
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            const EnergyBreakdown& e = result.history[i];
            energy << i << ',' << e.data_term << ',' << e.smooth_term << ',' << e.total << '\n';
        }
    }

    const ReductionStats& s = result.stats;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "cells %d -> %d\nedges %d -> %d\nvertices %d -> %d\nenergy %lld -> %lld (%.2f%% saved) in %zu cycles\n",
                  s.cells_before, s.cells_after, s.edges_before, s.edges_after, s.vertices_before, s.vertices_after,
                  static_cast<long long>(s.energy_before), static_cast<long long>(s.energy_after),
                  100.0 * s.energy_saved(), result.history.empty() ? std::size_t{0} : result.history.size() - 1);
    log << buf;
    for (const std::string& w : result.warnings) log << "warning: " << w << '\n';
    return result;
}

ReportRow run_solve(const SolveOptions& opt, const GlobalOptions& global, std::ostream& log)
{
    check_order(opt.order);
    check_lambda(opt.lambda);
    const ManufacturedSolution& sol = find_solution(opt.solution);
    const NamedMesh input = load_mesh(opt.mesh);
    const PlanarRun run = planar_run(input, sol, opt.order, opt.lambda, opt.condition, global);
    write_rows(global, input.id + "_" + sol.id + "_k" + std::to_string(opt.order), {run.row});
    print_row(log, run.row);
    return run.row;
}

std::vector<ReportRow> run_dfn(const DfnOptions& opt, const GlobalOptions& global, std::ostream& log)
{
    const FractureNetwork net = load_network(opt.network);
    const std::vector<NetworkJob> jobs = network_jobs(opt.areas, opt.cells, opt.lambdas);
    const std::vector<ReportRow> rows = run_network_grid(net, jobs, opt.orders, opt.condition, global);
    write_rows(global, net.name + "_report", rows);
    for (const ReportRow& r : rows) print_row(log, r);
    return rows;
}

ConvergenceResult run_convergence(const ConvergenceOptions& opt, const GlobalOptions& global, std::ostream& log)
{
    const bool network_mode = !opt.network.empty();
    if (network_mode == !opt.meshes.empty()) throw InputError("give either a network or a mesh family");
    for (int k : opt.orders) check_order(k);
    std::vector<double> lambdas = opt.lambdas;
    // Expected errors are rescaled from the unagglomerated runs.
    if (std::find(lambdas.begin(), lambdas.end(), 0.0) == lambdas.end()) lambdas.insert(lambdas.begin(), 0.0);

    ConvergenceResult result;
    std::string name;
    int levels = 0;
    if (network_mode) {
        const FractureNetwork net = load_network(opt.network);
        name = net.name;
        levels = static_cast<int>(opt.areas.size() + opt.cells.size());
        if (levels < 3) throw InputError("convergence needs at least 3 mesh targets");
        result.rows = run_network_grid(net, network_jobs(opt.areas, opt.cells, lambdas), opt.orders,
                                       opt.condition, global);
    } else {
        levels = static_cast<int>(opt.meshes.size());
        if (levels < 3) throw InputError("convergence needs at least 3 meshes");
        const ManufacturedSolution& sol = find_solution(opt.solution);
        name = sol.id;
        std::vector<NamedMesh> meshes;
        for (const std::string& m : opt.meshes) meshes.push_back(load_mesh(m));
        for (double lambda : lambdas) check_lambda(lambda);
        struct Job {
            int mesh;
            double lambda;
            int k;
        };
        std::vector<Job> jobs;
        for (int m = 0; m < levels; ++m) {
            for (double lambda : lambdas) {
                for (int k : opt.orders) jobs.push_back({m, lambda, k});
            }
        }
        result.rows.resize(jobs.size());
        run_parallel(static_cast<int>(jobs.size()), worker_count(global), [&](int i) {
            const Job& j = jobs[i];
            result.rows[i] = planar_run(meshes[j.mesh], sol, j.k, j.lambda, opt.condition, global).row;
        });
    }

    // Series per (lambda, k) in refinement order.
    std::map<std::pair<double, int>, std::vector<const ReportRow*>> series;
    for (const ReportRow& r : result.rows) series[{r.lambda, r.k}].push_back(&r);
    for (const auto& [key, rows] : series) {
        std::vector<double> h, dofs, l2, h1;
        for (const ReportRow* r : rows) {
            h.push_back(r->h);
            dofs.push_back(r->dofs);
            l2.push_back(r->err_l2);
            h1.push_back(r->err_h1);
        }
        RateRow rate;
        rate.lambda = key.first;
        rate.k = key.second;
        rate.points = static_cast<int>(rows.size());
        rate.l2_vs_h = log_log_slope(h, l2);
        rate.h1_vs_h = log_log_slope(h, h1);
        rate.l2_vs_dofs = log_log_slope(dofs, l2);
        rate.h1_vs_dofs = log_log_slope(dofs, h1);
        result.rates.push_back(rate);
    }

    write_rows(global, name + "_convergence_runs", result.rows);
    {
        std::ofstream out = open_output(global, name + "_convergence_rates" + report_extension(global));
        if (global.format == Format::json) {
            write_rates_json(out, result.rates);
        } else {
            write_rates_csv(out, result.rates);
        }
    }
    {
        // Measured errors beside the lambda = 0 errors of the same mesh rescaled to the DOF count.
        std::ofstream out = open_output(global, name + "_convergence_expected.csv");
        out << "mesh,k,lambda,dofs,err_l2,err_h1,err_l2_expected,err_h1_expected\n";
        for (const ReportRow& r : result.rows) {
            const auto ref = std::find_if(result.rows.begin(), result.rows.end(), [&](const ReportRow& q) {
                return q.mesh == r.mesh && q.k == r.k && q.lambda == 0.0;
            });
            const ExpectedErrors e = expected_errors(*ref, r.dofs);
            char buf[128];
            std::snprintf(buf, sizeof buf, ",%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n", r.k, r.lambda, r.dofs, r.err_l2,
                          r.err_h1, e.l2, e.h1);
            out << r.mesh << buf;
        }
    }

    char buf[160];
    log << "lambda  k  points  L2/h    H1/h    L2/dofs  H1/dofs\n";
    for (const RateRow& r : result.rates) {
        std::snprintf(buf, sizeof buf, "%-6g  %d  %-6d  %-6.3f  %-6.3f  %-7.3f  %-7.3f\n", r.lambda, r.k, r.points,
                      r.l2_vs_h, r.h1_vs_h, r.l2_vs_dofs, r.h1_vs_dofs);
        log << buf;
    }
    return result;
}

}  // namespace polyagg::cli
