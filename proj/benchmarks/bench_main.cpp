#include "polyagg/agglomerate.hpp"
#include "polyagg/dfn.hpp"
#include "polyagg/quality.hpp"
#include "polyagg/vem.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace polyagg;

namespace {

Polygon regular_polygon(int n)
{
    Polygon p;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        p.push_back({std::cos(t), std::sin(t)});
    }
    return p;
}

PolygonalMesh square_mesh(double area)
{
    const Polygon square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return triangulate_polygon(square, MeshTarget::max_area(area));
}

void BM_Quality(benchmark::State& state)
{
    const Polygon p = regular_polygon(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(quality(p));
}
BENCHMARK(BM_Quality)->Arg(3)->Arg(8)->Arg(32);

void BM_Agglomerate(benchmark::State& state)
{
    const PolygonalMesh mesh = square_mesh(1.0 / static_cast<double>(state.range(0)));
    AgglomerationConfig config;
    config.lambda = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(agglomerate(mesh, config));
    state.counters["cells"] = mesh.num_cells();
}
BENCHMARK(BM_Agglomerate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LocalProjectors(benchmark::State& state)
{
    const Polygon p = regular_polygon(8);
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(local_projectors(p, k));
}
BENCHMARK(BM_LocalProjectors)->DenseRange(1, 3);

void BM_PoissonSolve(benchmark::State& state)
{
    const PolygonalMesh mesh = square_mesh(1e-3);
    PoissonProblem problem;
    problem.source = [](const Vec2& p) { return std::sin(p.x()) * p.y(); };
    problem.dirichlet = [](const Vec2&) { return 0.0; };
    VemOptions options;
    options.estimate_condition = false;
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(mesh, problem, k, options));
}
BENCHMARK(BM_PoissonSolve)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_NetworkOnePipeline(benchmark::State& state)
{
    const FractureNetwork net = network1();
    NetworkMeshOptions options;
    options.target = MeshTarget::max_area(1e-2);
    options.agglomeration.lambda = 1.0;
    VemOptions vem;
    vem.estimate_condition = false;
    for (auto _ : state) {
        const NetworkMesh mesh = build_network_mesh(net, options);
        benchmark::DoNotOptimize(solve_network(net, mesh, 2, vem));
    }
}
BENCHMARK(BM_NetworkOnePipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
