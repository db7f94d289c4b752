#include "polyagg/dfn.hpp"

#include "polyagg/errors.hpp"

#include <algorithm>
#include <cmath>

namespace polyagg {

namespace {

bool on_plane(const Eigen::Vector4d& plane, const Vec3& p, double tol)
{
    const Vec3 n = plane.head<3>();
    return std::abs(n.dot(p) - plane[3]) <= tol * n.norm();
}

MeshBlock make_block(const FractureNetwork& network, int f, const PolygonalMesh& mesh,
                     const std::vector<VemElement>& elements)
{
    const Fracture& fracture = network.fractures[f];
    MeshBlock block;
    block.mesh = &mesh;
    block.elements = &elements;
    block.K = fracture.K;
    if (!network.sources.empty() && network.sources[f]) {
        block.source = [&fracture, src = network.sources[f]](const Vec2& p) {
            return src(fracture.to_global(p));
        };
    }

    std::vector<const DirichletSpec*> specs;
    for (const DirichletSpec& bc : network.dirichlet) {
        if (bc.fracture < 0 || bc.fracture == f) specs.push_back(&bc);
    }
    if (specs.empty()) return block;
    const double tol = 1e-9 * network.diameter();
    block.dirichlet = [&fracture, specs, tol](const Vec2& p) {
        const Vec3 x = fracture.to_global(p);
        for (const DirichletSpec* bc : specs) {
            if (!bc->plane || on_plane(*bc->plane, x, tol)) return bc->value(x);
        }
        return specs.front()->value(x);
    };
    block.dirichlet_edge = [&fracture, specs, tol](const Vec2& p, const Vec2& q) {
        const Vec3 a = fracture.to_global(p);
        const Vec3 b = fracture.to_global(q);
        for (const DirichletSpec* bc : specs) {
            if (!bc->plane) return true;
            if (on_plane(*bc->plane, a, tol) && on_plane(*bc->plane, b, tol)) return true;
        }
        return false;
    };
    return block;
}

}  // namespace

NetworkSystem assemble_network(const FractureNetwork& network, const StitchedNetwork& mesh, int k)
{
    const int nf = static_cast<int>(network.fractures.size());
    if (static_cast<int>(mesh.meshes.size()) != nf) throw InputError("one mesh per fracture expected");
    NetworkSystem out;
    std::vector<const PolygonalMesh*> pointers;
    for (const PolygonalMesh& m : mesh.meshes) pointers.push_back(&m);
    out.dofs = build_dof_map(pointers, mesh.global_vertices, k);
    out.elements.reserve(nf);
    for (int f = 0; f < nf; ++f) out.elements.push_back(build_elements(mesh.meshes[f], k));
    for (int f = 0; f < nf; ++f) out.blocks.push_back(make_block(network, f, mesh.meshes[f], out.elements[f]));
    out.system = assemble(out.blocks, out.dofs);
    return out;
}

NetworkSolution solve_network(const FractureNetwork& network, const NetworkMesh& mesh, int k,
                              const VemOptions& options)
{
    NetworkSolution out;
    out.system = assemble_network(network, mesh.stitched, k);
    const NetworkSystem& sys = out.system;
    SolveInfo info;
    out.solution = solve_spd(sys.system, &info);

    NetworkReport& r = out.report;
    r.order = k;
    r.dofs = sys.dofs.num_dofs();
    r.nnz = sys.system.nnz();
    r.residual = info.residual;
    r.has_exact = network.has_exact();
    if (options.estimate_condition && sys.system.A.rows() > 0) {
        const ConditionEstimate est = condition_estimate(sys.system.A);
        r.cond = est.cond;
        r.cond_converged = est.converged;
    }

    std::vector<ErrorNorms> parts;
    const int nf = static_cast<int>(network.fractures.size());
    for (int f = 0; f < nf; ++f) {
        const Fracture& fracture = network.fractures[f];
        FractureReport fr;
        fr.cells = mesh.stitched.meshes[f].num_cells();
        ScalarField u = [](const Vec2&) { return 0.0; };
        VectorField grad = [](const Vec2&) { return Vec2(0.0, 0.0); };
        if (network.has_exact()) {
            u = [&fracture, ex = network.exact[f]](const Vec2& p) { return ex(fracture.to_global(p)); };
            grad = [&fracture, g = network.exact_gradient[f]](const Vec2& p) {
                return fracture.tangential(g(fracture.to_global(p)));
            };
        }
        fr.errors = error_norms(sys.blocks[f], sys.dofs, f, out.solution, u, grad);
        for (const VemElement& el : sys.elements[f]) {
            const ProjectorDiscrepancy d = projector_discrepancy(el);
            fr.max_pi_nabla = std::max(fr.max_pi_nabla, d.nabla);
            fr.max_pi_0 = std::max(fr.max_pi_0, d.l2);
        }
        r.cells += fr.cells;
        r.max_pi_nabla = std::max(r.max_pi_nabla, fr.max_pi_nabla);
        r.max_pi_0 = std::max(r.max_pi_0, fr.max_pi_0);
        parts.push_back(fr.errors);
        r.fractures.push_back(fr);
    }
    r.errors = combine(parts);
    return out;
}

}  // namespace polyagg
