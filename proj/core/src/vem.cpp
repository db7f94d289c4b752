#include "polyagg/vem.hpp"

#include "polyagg/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace polyagg {

MonomialBasis::MonomialBasis(int degree, const Vec2& center, double h)
    : degree_(degree), center_(center), h_(h)
{
    for (int d = 0; d <= degree; ++d) {
        for (int a = d; a >= 0; --a) exponents_.push_back({a, d - a});
    }
}

int MonomialBasis::index(int a, int b) const
{
    if (a < 0 || b < 0 || a + b > degree_) return -1;
    const int d = a + b;
    return dimension(d - 1) + (d - a);
}

Eigen::VectorXd MonomialBasis::values(const Vec2& x) const
{
    const double sx = (x.x() - center_.x()) / h_;
    const double sy = (x.y() - center_.y()) / h_;
    std::array<double, kMaxOrder + 3> px{}, py{};
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree_; ++i) {
        px[i] = px[i - 1] * sx;
        py[i] = py[i - 1] * sy;
    }
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = px[exponents_[i][0]] * py[exponents_[i][1]];
    return v;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> MonomialBasis::gradients(const Vec2& x) const
{
    const double sx = (x.x() - center_.x()) / h_;
    const double sy = (x.y() - center_.y()) / h_;
    std::array<double, kMaxOrder + 3> px{}, py{};
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree_; ++i) {
        px[i] = px[i - 1] * sx;
        py[i] = py[i - 1] * sy;
    }
    Eigen::Matrix<double, Eigen::Dynamic, 2> g(size(), 2);
    for (int i = 0; i < size(); ++i) {
        const int a = exponents_[i][0];
        const int b = exponents_[i][1];
        g(i, 0) = a > 0 ? a * px[a - 1] * py[b] / h_ : 0.0;
        g(i, 1) = b > 0 ? b * px[a] * py[b - 1] / h_ : 0.0;
    }
    return g;
}

namespace {

std::string cell_label(int cell_id)
{
    return cell_id >= 0 ? "cell " + std::to_string(cell_id) : "cell";
}

}  // namespace

VemElement local_projectors(std::span<const Vec2> polygon, int k, int cell_id)
{
    if (k < 1 || k > kMaxOrder) throw InputError("VEM order must be 1, 2 or 3");
    VemElement el;
    el.order = k;
    el.polygon.assign(polygon.begin(), polygon.end());
    const int n = static_cast<int>(polygon.size());
    el.layout = {k, n};
    el.area = signed_area(polygon);
    if (!(el.area > 0.0)) {
        throw GeometryError(cell_label(cell_id) + " is not counter-clockwise with positive area");
    }
    const double h = diameter(polygon);
    el.basis = MonomialBasis(k, centroid(polygon), h);
    el.quadrature = polygon_quadrature(polygon, 2 * k + 2);

    const LocalLayout& L = el.layout;
    const int nk = el.basis.size();
    const int ndof = L.size();
    const int nl = MonomialBasis::dimension(k - 1);
    const int nm = L.num_moments();
    const LineRule lobatto = gauss_lobatto(k + 1);

    el.dof_points.assign(polygon.begin(), polygon.end());
    for (int e = 0; e < n; ++e) {
        for (const Vec2& p : gauss_lobatto_points(k, polygon[e], polygon[(e + 1) % n])) {
            el.dof_points.push_back(p);
        }
    }

    el.H = Eigen::MatrixXd::Zero(nk, nk);
    for (std::size_t q = 0; q < el.quadrature.points.size(); ++q) {
        const Eigen::VectorXd m = el.basis.values(el.quadrature.points[q]);
        el.H.noalias() += el.quadrature.weights[q] * m * m.transpose();
    }

    el.D.resize(ndof, nk);
    for (int i = 0; i < static_cast<int>(el.dof_points.size()); ++i) {
        el.D.row(i) = el.basis.values(el.dof_points[i]).transpose();
    }
    for (int j = 0; j < nm; ++j) {
        el.D.row(L.moment_offset() + j) = el.H.col(j).transpose() / el.area;
    }

    // Local DOF of the j-th Lobatto node on edge e (j = 0 and j = k are the vertices).
    auto edge_dof = [&](int e, int j) {
        if (j == 0) return e;
        if (j == k) return (e + 1) % n;
        return L.edge_offset(e) + j - 1;
    };

    el.B = Eigen::MatrixXd::Zero(nk, ndof);
    std::array<Eigen::MatrixXd, 2> grad_rhs{Eigen::MatrixXd::Zero(nl, ndof),
                                            Eigen::MatrixXd::Zero(nl, ndof)};
    for (int e = 0; e < n; ++e) {
        const Vec2& a = polygon[e];
        const Vec2& b = polygon[(e + 1) % n];
        const Vec2 t = b - a;
        const double len = t.norm();
        const Vec2 normal(t.y() / len, -t.x() / len);
        for (int j = 0; j <= k; ++j) {
            const Vec2 x = a + lobatto.points[j] * t;
            const double w = lobatto.weights[j] * len;
            const int dof = edge_dof(e, j);
            const Eigen::VectorXd m = el.basis.values(x);
            const auto g = el.basis.gradients(x);
            if (k == 1) el.B(0, dof) += w;
            for (int alpha = 1; alpha < nk; ++alpha) {
                el.B(alpha, dof) += w * (g(alpha, 0) * normal.x() + g(alpha, 1) * normal.y());
            }
            for (int beta = 0; beta < nl; ++beta) {
                grad_rhs[0](beta, dof) += w * m[beta] * normal.x();
                grad_rhs[1](beta, dof) += w * m[beta] * normal.y();
            }
        }
    }
    if (k >= 2) el.B(0, L.moment_offset()) = 1.0;
    const double h2 = h * h;
    for (int alpha = 1; alpha < nk; ++alpha) {
        const int a = el.basis.exponents()[alpha][0];
        const int b = el.basis.exponents()[alpha][1];
        if (a >= 2) {
            el.B(alpha, L.moment_offset() + el.basis.index(a - 2, b)) -= el.area * a * (a - 1) / h2;
        }
        if (b >= 2) {
            el.B(alpha, L.moment_offset() + el.basis.index(a, b - 2)) -= el.area * b * (b - 1) / h2;
        }
    }
    for (int beta = 0; beta < nl; ++beta) {
        const int a = el.basis.exponents()[beta][0];
        const int b = el.basis.exponents()[beta][1];
        if (a >= 1) grad_rhs[0](beta, L.moment_offset() + el.basis.index(a - 1, b)) -= el.area * a / h;
        if (b >= 1) grad_rhs[1](beta, L.moment_offset() + el.basis.index(a, b - 1)) -= el.area * b / h;
    }

    el.G = el.B * el.D;
    Eigen::FullPivLU<Eigen::MatrixXd> g_lu(el.G);
    // Thin cells make G badly conditioned long before it is singular; the projector
    // discrepancy reports that degradation, so only reject numerically rank-deficient G.
    g_lu.setThreshold(1e-20);
    if (!g_lu.isInvertible()) {
        throw NumericalError(cell_label(cell_id) + ": singular H1 projection matrix");
    }
    el.pi_nabla = g_lu.solve(el.B);

    el.C.resize(nk, ndof);
    const Eigen::MatrixXd h_pi = el.H * el.pi_nabla;
    for (int alpha = 0; alpha < nk; ++alpha) {
        if (alpha < nm) {
            el.C.row(alpha).setZero();
            el.C(alpha, L.moment_offset() + alpha) = el.area;
        } else {
            el.C.row(alpha) = h_pi.row(alpha);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> h_llt(el.H);
    if (h_llt.info() != Eigen::Success) {
        throw NumericalError(cell_label(cell_id) + ": singular monomial mass matrix");
    }
    el.pi_0 = h_llt.solve(el.C);
    Eigen::LLT<Eigen::MatrixXd> low_llt(el.H.topLeftCorner(nl, nl));
    el.pi_0_low = low_llt.solve(el.C.topRows(nl));
    el.pi_0_grad[0] = low_llt.solve(grad_rhs[0]);
    el.pi_0_grad[1] = low_llt.solve(grad_rhs[1]);
    return el;
}

namespace {

double spectral_norm_checked(const Eigen::Matrix2d& K)
{
    const double scale = K.cwiseAbs().maxCoeff();
    if (!K.allFinite() || std::abs(K(0, 1) - K(1, 0)) > 1e-12 * scale) {
        throw InputError("diffusion tensor must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(K);
    if (!(es.eigenvalues()[0] > 0.0)) throw InputError("diffusion tensor must be positive definite");
    return es.eigenvalues()[1];
}

}  // namespace

Eigen::MatrixXd consistency_matrix(const VemElement& el, const Eigen::Matrix2d& K)
{
    const int nl = MonomialBasis::dimension(el.order - 1);
    const Eigen::MatrixXd Hl = el.H.topLeftCorner(nl, nl);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(el.size(), el.size());
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
            if (K(c, d) == 0.0) continue;
            A.noalias() += K(c, d) * el.pi_0_grad[c].transpose() * Hl * el.pi_0_grad[d];
        }
    }
    return A;
}

Eigen::MatrixXd local_stiffness(const VemElement& el, const Eigen::Matrix2d& K)
{
    const double knorm = spectral_norm_checked(K);
    Eigen::MatrixXd A = consistency_matrix(el, K);
    const Eigen::MatrixXd R =
        Eigen::MatrixXd::Identity(el.size(), el.size()) - el.D * el.pi_nabla;
    A.noalias() += knorm * R.transpose() * R;
    return 0.5 * (A + A.transpose());
}

Eigen::VectorXd local_load(const VemElement& el, const ScalarField& f)
{
    const int nl = MonomialBasis::dimension(el.order - 1);
    Eigen::VectorXd moments = Eigen::VectorXd::Zero(nl);
    for (std::size_t q = 0; q < el.quadrature.points.size(); ++q) {
        const Vec2& x = el.quadrature.points[q];
        moments += el.quadrature.weights[q] * f(x) * el.basis.values(x).head(nl);
    }
    return el.pi_0_low.transpose() * moments;
}

Eigen::VectorXd interpolate(const VemElement& el, const ScalarField& u)
{
    Eigen::VectorXd v(el.size());
    for (std::size_t i = 0; i < el.dof_points.size(); ++i) v[i] = u(el.dof_points[i]);
    const int nm = el.layout.num_moments();
    if (nm > 0) {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(nm);
        for (std::size_t q = 0; q < el.quadrature.points.size(); ++q) {
            const Vec2& x = el.quadrature.points[q];
            m += el.quadrature.weights[q] * u(x) * el.basis.values(x).head(nm);
        }
        v.tail(nm) = m / el.area;
    }
    return v;
}

ProjectorDiscrepancy projector_discrepancy(const VemElement& el)
{
    const int nk = el.basis.size();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nk, nk);
    auto norm2 = [](const Eigen::MatrixXd& M) {
        return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()[0];
    };
    return {norm2(el.pi_nabla * el.D - I), norm2(el.pi_0 * el.D - I)};
}

DofMap build_dof_map(std::span<const PolygonalMesh* const> meshes,
                     std::span<const std::vector<int>> global_vertices, int k)
{
    if (k < 1 || k > kMaxOrder) throw InputError("VEM order must be 1, 2 or 3");
    if (meshes.size() != global_vertices.size()) {
        throw InputError("one global vertex table per mesh is required");
    }
    DofMap map;
    map.order_ = k;
    int nv = 0;
    for (std::size_t b = 0; b < meshes.size(); ++b) {
        if (static_cast<int>(global_vertices[b].size()) != meshes[b]->num_vertices()) {
            throw InputError("global vertex table size does not match the mesh");
        }
        for (int g : global_vertices[b]) nv = std::max(nv, g + 1);
    }
    map.num_vertex_dofs_ = nv;
    int next = nv;
    std::vector<char> boundary(nv, 0);

    // Edge DOFs keyed by the global vertex pair.
    std::unordered_map<std::uint64_t, int> edge_first;
    auto key = [](int u, int v) {
        if (u > v) std::swap(u, v);
        return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
    };
    const int per_edge = k - 1;
    const int nm = MonomialBasis::dimension(k - 2);

    map.cell_dofs_.resize(meshes.size());
    for (std::size_t b = 0; b < meshes.size(); ++b) {
        const PolygonalMesh& mesh = *meshes[b];
        const auto& gv = global_vertices[b];
        map.cell_dofs_[b].resize(mesh.num_cells());
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const auto& bd = mesh.cells()[c].boundary;
            const int n = static_cast<int>(bd.size());
            std::vector<int>& dofs = map.cell_dofs_[b][c];
            dofs.assign(n * k + nm, -1);
            const auto edges = mesh.cell_edges(c);
            for (int i = 0; i < n; ++i) {
                dofs[i] = gv[bd[i]];
                if (mesh.edges()[edges[i]].on_boundary()) {
                    boundary[gv[bd[i]]] = 1;
                    boundary[gv[bd[(i + 1) % n]]] = 1;
                }
            }
            if (per_edge == 0) continue;
            for (int i = 0; i < n; ++i) {
                const int g0 = gv[bd[i]];
                const int g1 = gv[bd[(i + 1) % n]];
                auto [it, inserted] = edge_first.try_emplace(key(g0, g1), next);
                if (inserted) {
                    next += per_edge;
                    const bool on_bd = mesh.edges()[edges[i]].on_boundary();
                    boundary.resize(next, on_bd ? 1 : 0);
                } else if (mesh.edges()[edges[i]].on_boundary()) {
                    for (int j = 0; j < per_edge; ++j) boundary[it->second + j] = 1;
                }
                for (int j = 0; j < per_edge; ++j) {
                    dofs[n + i * per_edge + j] =
                        g0 < g1 ? it->second + j : it->second + per_edge - 1 - j;
                }
            }
        }
    }
    for (std::size_t b = 0; b < meshes.size(); ++b) {
        for (auto& dofs : map.cell_dofs_[b]) {
            for (int j = 0; j < nm; ++j) dofs[dofs.size() - nm + j] = next++;
        }
    }
    boundary.resize(next, 0);
    map.num_dofs_ = next;
    map.boundary_.assign(boundary.begin(), boundary.end());
    return map;
}

DofMap build_dof_map(const PolygonalMesh& mesh, int k)
{
    std::vector<int> ids(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) ids[v] = v;
    const PolygonalMesh* meshes[] = {&mesh};
    const std::vector<int> tables[] = {std::move(ids)};
    return build_dof_map(meshes, tables, k);
}

std::vector<VemElement> build_elements(const PolygonalMesh& mesh, int k)
{
    std::vector<VemElement> out;
    out.reserve(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        out.push_back(local_projectors(mesh.cell_polygon(c), k, c));
    }
    return out;
}

SparseSpdSystem assemble(std::span<const MeshBlock> blocks, const DofMap& dofs)
{
    const int N = dofs.num_dofs();
    SparseSpdSystem sys;
    sys.num_dofs = N;
    sys.fixed.assign(N, false);
    sys.fixed_values = Eigen::VectorXd::Zero(N);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
    std::vector<Eigen::Triplet<double>> triplets;

    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const MeshBlock& block = blocks[b];
        if (!block.mesh || !block.elements) throw InputError("mesh block without mesh or elements");
        const PolygonalMesh& mesh = *block.mesh;
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const VemElement& el = (*block.elements)[c];
            const auto map = dofs.cell_dofs(static_cast<int>(b), c);
            const Eigen::MatrixXd Ae = local_stiffness(el, block.K);
            for (int i = 0; i < el.size(); ++i) {
                for (int j = 0; j < el.size(); ++j) {
                    if (Ae(i, j) != 0.0) triplets.emplace_back(map[i], map[j], Ae(i, j));
                }
            }
            if (block.source) {
                const Eigen::VectorXd fe = local_load(el, block.source);
                for (int i = 0; i < el.size(); ++i) rhs[map[i]] += fe[i];
            }
            if (!block.dirichlet) continue;
            const auto& bd = mesh.cells()[c].boundary;
            const int n = static_cast<int>(bd.size());
            const auto edges = mesh.cell_edges(c);
            for (int e = 0; e < n; ++e) {
                if (!mesh.edges()[edges[e]].on_boundary()) continue;
                const Vec2& p = el.polygon[e];
                const Vec2& q = el.polygon[(e + 1) % n];
                if (block.dirichlet_edge && !block.dirichlet_edge(p, q)) continue;
                auto fix = [&](int local) {
                    const int g = map[local];
                    if (sys.fixed[g]) return;
                    sys.fixed[g] = true;
                    sys.fixed_values[g] = block.dirichlet(el.dof_points[local]);
                };
                fix(e);
                fix((e + 1) % n);
                for (int j = 0; j < el.layout.per_edge(); ++j) fix(el.layout.edge_offset(e) + j);
            }
        }
    }

    Eigen::SparseMatrix<double> full(N, N);
    full.setFromTriplets(triplets.begin(), triplets.end());
    triplets.clear();

    std::vector<int> reduced(N, -1);
    for (int g = 0; g < N; ++g) {
        if (!sys.fixed[g]) {
            reduced[g] = static_cast<int>(sys.free_dofs.size());
            sys.free_dofs.push_back(g);
        }
    }
    const int n = static_cast<int>(sys.free_dofs.size());
    sys.b.resize(n);
    for (int i = 0; i < n; ++i) sys.b[i] = rhs[sys.free_dofs[i]];
    for (int col = 0; col < N; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            if (reduced[r] < 0) continue;
            if (reduced[col] >= 0) {
                triplets.emplace_back(reduced[r], reduced[col], it.value());
            } else {
                sys.b[reduced[r]] -= it.value() * sys.fixed_values[col];
            }
        }
    }
    sys.A.resize(n, n);
    sys.A.setFromTriplets(triplets.begin(), triplets.end());
    sys.A.makeCompressed();
    return sys;
}

Eigen::VectorXd solve_spd(const SparseSpdSystem& sys, SolveInfo* info)
{
    Eigen::VectorXd full = sys.fixed_values;
    if (sys.A.rows() == 0) {
        if (info) *info = {};
        return full;
    }
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.A);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("Cholesky factorization failed: matrix is not positive definite");
    }
    Eigen::VectorXd x = llt.solve(sys.b);
    const double bnorm = sys.b.norm() > 0.0 ? sys.b.norm() : 1.0;
    double res = (sys.A * x - sys.b).norm() / bnorm;
    int steps = 0;
    while (res > 1e-15 && steps < 5) {
        const Eigen::VectorXd r = sys.b - sys.A * x;
        const Eigen::VectorXd y = x + llt.solve(r);
        const double res_new = (sys.A * y - sys.b).norm() / bnorm;
        ++steps;
        if (!(res_new < res)) break;
        x = y;
        res = res_new;
    }
    if (!x.allFinite()) throw NumericalError("linear solve produced non-finite values");
    for (std::size_t i = 0; i < sys.free_dofs.size(); ++i) full[sys.free_dofs[i]] = x[i];
    if (info) {
        info->residual = res;
        info->refinement_steps = steps;
    }
    return full;
}

ConditionEstimate condition_estimate(const Eigen::SparseMatrix<double>& A, double tol,
                                     int max_iterations)
{
    ConditionEstimate est;
    const Eigen::Index n = A.rows();
    if (n == 0) return est;
    Eigen::VectorXd start(n);
    for (Eigen::Index i = 0; i < n; ++i) start[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
    start.normalize();

    bool max_ok = false;
    Eigen::VectorXd v = start;
    double lambda = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd w = A * v;
        const double next = v.dot(w);
        v = w / w.norm();
        if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
            lambda = next;
            max_ok = true;
            break;
        }
        lambda = next;
    }
    est.lambda_max = lambda;

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(A);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("Cholesky factorization failed: matrix is not positive definite");
    }
    bool min_ok = false;
    v = start;
    double mu = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd w = llt.solve(v);
        const double next = v.dot(w);
        v = w / w.norm();
        if (it > 0 && std::abs(next - mu) <= tol * std::abs(next)) {
            mu = next;
            min_ok = true;
            break;
        }
        mu = next;
    }
    est.lambda_min = 1.0 / mu;
    est.cond = est.lambda_max / est.lambda_min;
    est.converged = max_ok && min_ok;
    return est;
}

ErrorNorms error_norms(const MeshBlock& block, const DofMap& dofs, int block_id,
                       const Eigen::VectorXd& solution, const ScalarField& u,
                       const VectorField& grad_u)
{
    ErrorNorms err;
    const auto& elements = *block.elements;
    for (int c = 0; c < static_cast<int>(elements.size()); ++c) {
        const VemElement& el = elements[c];
        const auto map = dofs.cell_dofs(block_id, c);
        Eigen::VectorXd local(el.size());
        for (int i = 0; i < el.size(); ++i) local[i] = solution[map[i]];
        const Eigen::VectorXd coeff = el.pi_0 * local;
        const Eigen::VectorXd gx = el.pi_0_grad[0] * local;
        const Eigen::VectorXd gy = el.pi_0_grad[1] * local;
        const int nl = static_cast<int>(gx.size());
        for (std::size_t q = 0; q < el.quadrature.points.size(); ++q) {
            const Vec2& x = el.quadrature.points[q];
            const double w = el.quadrature.weights[q];
            const Eigen::VectorXd m = el.basis.values(x);
            const double uh = coeff.dot(m);
            const Vec2 gh(gx.dot(m.head(nl)), gy.dot(m.head(nl)));
            const double ue = u(x);
            const Vec2 ge = grad_u(x);
            err.l2 += w * (ue - uh) * (ue - uh);
            err.h1 += w * (ge - gh).squaredNorm();
            err.l2_exact += w * ue * ue;
            err.h1_exact += w * ge.squaredNorm();
        }
    }
    err.l2 = std::sqrt(std::max(err.l2, 0.0));
    err.h1 = std::sqrt(std::max(err.h1, 0.0));
    err.l2_exact = std::sqrt(std::max(err.l2_exact, 0.0));
    err.h1_exact = std::sqrt(std::max(err.h1_exact, 0.0));
    return err;
}

ErrorNorms combine(std::span<const ErrorNorms> parts)
{
    ErrorNorms out;
    for (const ErrorNorms& p : parts) {
        out.l2 += p.l2 * p.l2;
        out.h1 += p.h1 * p.h1;
        out.l2_exact += p.l2_exact * p.l2_exact;
        out.h1_exact += p.h1_exact * p.h1_exact;
    }
    out.l2 = std::sqrt(out.l2);
    out.h1 = std::sqrt(out.h1);
    out.l2_exact = std::sqrt(out.l2_exact);
    out.h1_exact = std::sqrt(out.h1_exact);
    return out;
}

VemReport solve_poisson(const PolygonalMesh& mesh, const PoissonProblem& problem, int k,
                        const VemOptions& options)
{
    if (!problem.dirichlet) throw InputError("Dirichlet data is required");
    const std::vector<VemElement> elements = build_elements(mesh, k);
    const DofMap dofs = build_dof_map(mesh, k);
    MeshBlock block;
    block.mesh = &mesh;
    block.elements = &elements;
    block.K = problem.K;
    block.source = problem.source;
    block.dirichlet = problem.dirichlet;
    const SparseSpdSystem sys = assemble(std::span(&block, 1), dofs);

    VemReport rep;
    rep.order = k;
    rep.cells = mesh.num_cells();
    rep.dofs = dofs.num_dofs();
    rep.nnz = sys.nnz();
    SolveInfo info;
    rep.solution = solve_spd(sys, &info);
    rep.residual = info.residual;
    if (problem.exact && problem.exact_gradient) {
        rep.errors = error_norms(block, dofs, 0, rep.solution, problem.exact, problem.exact_gradient);
    }
    for (const VemElement& el : elements) {
        const ProjectorDiscrepancy d = projector_discrepancy(el);
        rep.max_pi_nabla = std::max(rep.max_pi_nabla, d.nabla);
        rep.max_pi_0 = std::max(rep.max_pi_0, d.l2);
    }
    if (options.estimate_condition && sys.A.rows() > 0) {
        const ConditionEstimate c = condition_estimate(sys.A);
        rep.cond = c.cond;
        rep.cond_converged = c.converged;
    }
    return rep;
}

std::vector<double> cell_values(const std::vector<VemElement>& elements, const DofMap& dofs,
                                int block_id, const Eigen::VectorXd& solution)
{
    std::vector<double> out;
    out.reserve(elements.size());
    for (int c = 0; c < static_cast<int>(elements.size()); ++c) {
        const VemElement& el = elements[c];
        const auto map = dofs.cell_dofs(block_id, c);
        Eigen::VectorXd local(el.size());
        for (int i = 0; i < el.size(); ++i) local[i] = solution[map[i]];
        out.push_back((el.pi_0 * local).dot(el.basis.values(el.basis.center())));
    }
    return out;
}

}  // namespace polyagg
