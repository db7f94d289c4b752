#include "polyagg/agglomerate.hpp"
#include "polyagg/vem.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace polyagg;

namespace {

const Polygon kSquare{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
const Polygon kTriangle{{0, 0}, {1, 0}, {0, 1}};
const Polygon kPentagon{{0, 0}, {2, 0}, {2.3, 1.2}, {1, 2}, {-0.2, 1}};

// A polynomial of total degree k with all coefficients nonzero, and its derivatives.
struct Poly {
    int k;
    double operator()(const Vec2& p) const
    {
        const double x = p.x(), y = p.y();
        double v = 1.0 + 2.0 * x - 3.0 * y;
        if (k >= 2) v += 0.5 * x * x - 1.5 * x * y + 0.7 * y * y;
        if (k >= 3) v += 0.3 * x * x * x + 0.2 * x * x * y - 0.4 * x * y * y + 0.6 * y * y * y;
        return v;
    }
    Vec2 grad(const Vec2& p) const
    {
        const double x = p.x(), y = p.y();
        Vec2 g(2.0, -3.0);
        if (k >= 2) g += Vec2(x - 1.5 * y, -1.5 * x + 1.4 * y);
        if (k >= 3) {
            g += Vec2(0.9 * x * x + 0.4 * x * y - 0.4 * y * y, 0.2 * x * x - 0.8 * x * y + 1.8 * y * y);
        }
        return g;
    }
    double laplacian(const Vec2& p) const
    {
        const double x = p.x(), y = p.y();
        double l = 0.0;
        if (k >= 2) l += 1.0 + 1.4;
        if (k >= 3) l += 1.8 * x + 0.4 * y - 0.8 * x + 3.6 * y;
        return l;
    }
};

PoissonProblem poly_problem(int k)
{
    const Poly p{k};
    PoissonProblem prob;
    prob.source = [p](const Vec2& x) { return -p.laplacian(x); };
    prob.dirichlet = p;
    prob.exact = p;
    prob.exact_gradient = [p](const Vec2& x) { return p.grad(x); };
    return prob;
}

PoissonProblem sine_problem()
{
    using std::numbers::pi;
    PoissonProblem prob;
    prob.source = [](const Vec2& x) {
        return 2 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
    };
    prob.exact = [](const Vec2& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
    prob.dirichlet = prob.exact;
    prob.exact_gradient = [](const Vec2& x) {
        return Vec2(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                    pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
    };
    return prob;
}

}  // namespace

TEST(Monomials, BasisLayout)
{
    const MonomialBasis m(3, Vec2(1, 2), 0.5);
    EXPECT_EQ(m.size(), 10);
    EXPECT_EQ(m.index(0, 0), 0);
    EXPECT_EQ(m.index(1, 0), 1);
    EXPECT_EQ(m.index(0, 1), 2);
    EXPECT_EQ(m.index(1, 1), 4);
    EXPECT_EQ(m.index(0, 3), 9);
    const Eigen::VectorXd at_center = m.values(Vec2(1, 2));
    EXPECT_EQ(at_center[0], 1.0);
    EXPECT_EQ(at_center.tail(9).norm(), 0.0);
    const Eigen::VectorXd v = m.values(Vec2(1.5, 3));
    EXPECT_DOUBLE_EQ(v[m.index(2, 1)], 1.0 * 2.0);  // (0.5/0.5)^2 * (1/0.5)
}

TEST(VemElement, DofCounts)
{
    for (int k = 1; k <= 3; ++k) {
        const VemElement el = local_projectors(kPentagon, k);
        EXPECT_EQ(el.size(), 5 * k + k * (k - 1) / 2);
    }
}

TEST(VemElement, ProjectorsReproducePolynomials)
{
    for (const Polygon* p : {&kSquare, &kTriangle, &kPentagon}) {
        for (int k = 1; k <= 3; ++k) {
            const VemElement el = local_projectors(*p, k);
            const ProjectorDiscrepancy d = projector_discrepancy(el);
            EXPECT_LE(d.nabla, 1e-11) << "k=" << k;
            EXPECT_LE(d.l2, 1e-11) << "k=" << k;
        }
    }
}

TEST(VemElement, ProjectorsCoincideBelowOrderThree)
{
    for (int k = 1; k <= 2; ++k) {
        const VemElement el = local_projectors(kPentagon, k);
        EXPECT_LE((el.pi_nabla - el.pi_0).norm(), 1e-12);
    }
    const VemElement el3 = local_projectors(kPentagon, 3);
    EXPECT_GT((el3.pi_nabla - el3.pi_0).norm(), 1e-6);
}

TEST(VemElement, GradientOfConstantVanishes)
{
    for (int k = 1; k <= 3; ++k) {
        const VemElement el = local_projectors(kPentagon, k);
        const Eigen::VectorXd one = interpolate(el, [](const Vec2&) { return 1.0; });
        EXPECT_LE((el.pi_0_grad[0] * one).norm(), 1e-13);
        EXPECT_LE((el.pi_0_grad[1] * one).norm(), 1e-13);
    }
}

TEST(VemElement, LinearTriangleMatchesFiniteElements)
{
    const VemElement el = local_projectors(kTriangle, 1);
    Eigen::Matrix3d fem;
    fem << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    EXPECT_LE((consistency_matrix(el, Eigen::Matrix2d::Identity()) - fem).norm(), 1e-14);
}

TEST(VemElement, StiffnessKernelAndEnergy)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const Polygon p = fixtures::random_star_polygon(rng, 3 + trial % 7);
        for (int k = 1; k <= 3; ++k) {
            const VemElement el = local_projectors(p, k);
            const Eigen::MatrixXd A = local_stiffness(el, Eigen::Matrix2d::Identity());
            EXPECT_EQ((A - A.transpose()).norm(), 0.0);
            const Eigen::VectorXd one = interpolate(el, [](const Vec2&) { return 1.0; });
            EXPECT_LE((A * one).norm(), 1e-12 * A.norm());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
            EXPECT_LE(std::abs(es.eigenvalues()[0]), 1e-12 * es.eigenvalues().maxCoeff());
            EXPECT_GT(es.eigenvalues()[1], 1e-8 * es.eigenvalues().maxCoeff());
            const Eigen::VectorXd x = interpolate(el, [](const Vec2& q) { return q.x(); });
            EXPECT_NEAR(x.dot(A * x), el.area, 1e-12 * el.area);
        }
    }
}

TEST(VemElement, StabilizationScalesWithK)
{
    const VemElement el = local_projectors(kPentagon, 2);
    Eigen::Matrix2d K;
    K << 2.0, 0.3, 0.3, 1.0;
    const Eigen::MatrixXd A1 = local_stiffness(el, K);
    const Eigen::MatrixXd A3 = local_stiffness(el, 3.0 * K);
    EXPECT_LE((A3 - 3.0 * A1).norm(), 1e-13 * A3.norm());
    Eigen::Matrix2d bad;
    bad << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(local_stiffness(el, bad), InputError);
    bad << 1.0, 0.5, 0.0, 1.0;
    EXPECT_THROW(local_stiffness(el, bad), InputError);
}

TEST(VemElement, SliverDegradesProjectors)
{
    const Polygon sliver{{0, 0}, {1, 0}, {1, 1e-3}, {0, 1e-3}};
    const double healthy = projector_discrepancy(local_projectors(kSquare, 3)).nabla;
    const double thin = projector_discrepancy(local_projectors(sliver, 3)).nabla;
    EXPECT_GT(thin, healthy);
}

TEST(DofMap, CountsAndSharing)
{
    const PolygonalMesh m = fixtures::quad_mesh(2, 2);
    EXPECT_EQ(build_dof_map(m, 1).num_dofs(), 9);
    EXPECT_EQ(build_dof_map(m, 2).num_dofs(), 9 + 12 + 4);
    EXPECT_EQ(build_dof_map(m, 3).num_dofs(), 9 + 24 + 12);
    // Shared edge DOFs sit at the same physical point in both cells.
    const DofMap dm = build_dof_map(m, 3);
    const auto elements = build_elements(m, 3);
    std::map<int, Vec2> where;
    for (int c = 0; c < m.num_cells(); ++c) {
        const auto dofs = dm.cell_dofs(0, c);
        for (std::size_t i = 0; i < elements[c].dof_points.size(); ++i) {
            auto [it, inserted] = where.emplace(dofs[i], elements[c].dof_points[i]);
            if (!inserted) EXPECT_LE((it->second - elements[c].dof_points[i]).norm(), 1e-15);
        }
    }
}

TEST(Solver, TinySystems)
{
    SparseSpdSystem s;
    s.A.resize(1, 1);
    s.A.insert(0, 0) = 2.0;
    s.b = Eigen::VectorXd::Constant(1, 4.0);
    s.free_dofs = {0};
    s.fixed = {false};
    s.fixed_values = Eigen::VectorXd::Zero(1);
    s.num_dofs = 1;
    EXPECT_DOUBLE_EQ(solve_spd(s)[0], 2.0);

    s.A.coeffRef(0, 0) = -1.0;
    EXPECT_THROW(solve_spd(s), NumericalError);
}

TEST(Solver, ConditionEstimates)
{
    Eigen::SparseMatrix<double> I(5, 5);
    I.setIdentity();
    EXPECT_NEAR(condition_estimate(I).cond, 1.0, 1e-12);

    Eigen::SparseMatrix<double> D(3, 3);
    D.insert(0, 0) = 1;
    D.insert(1, 1) = 10;
    D.insert(2, 2) = 100;
    EXPECT_NEAR(condition_estimate(D).cond, 100.0, 1.0);

    const int n = 10;
    Eigen::SparseMatrix<double> L(n, n);
    for (int i = 0; i < n; ++i) {
        L.insert(i, i) = 2;
        if (i > 0) L.insert(i, i - 1) = -1;
        if (i + 1 < n) L.insert(i, i + 1) = -1;
    }
    const double exact = (2 - 2 * std::cos(n * std::numbers::pi / (n + 1))) /
                         (2 - 2 * std::cos(std::numbers::pi / (n + 1)));
    EXPECT_NEAR(exact, 48.374, 1e-3);
    const ConditionEstimate c = condition_estimate(L);
    EXPECT_TRUE(c.converged);
    EXPECT_NEAR(c.cond, exact, 0.01 * exact);
}

TEST(Assembly, TwoTrianglesLinearData)
{
    const std::vector<Vec2> p{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const PolygonalMesh m = build_mesh(p, {{0, 1, 2}, {0, 2, 3}});
    PoissonProblem prob;
    prob.dirichlet = [](const Vec2& x) { return x.x(); };
    const VemReport r = solve_poisson(m, prob, 1);
    EXPECT_EQ(r.dofs, 4);
    for (int v = 0; v < 4; ++v) EXPECT_DOUBLE_EQ(r.solution[v], p[v].x());
}

TEST(Assembly, SymmetricPattern)
{
    const PolygonalMesh m = fixtures::distorted_quad_mesh(4);
    for (int k = 1; k <= 3; ++k) {
        const auto elements = build_elements(m, k);
        const DofMap dofs = build_dof_map(m, k);
        MeshBlock block{&m, &elements};
        block.dirichlet = [](const Vec2&) { return 0.0; };
        const SparseSpdSystem s = assemble(std::span(&block, 1), dofs);
        const Eigen::SparseMatrix<double> At = s.A.transpose();
        EXPECT_EQ((s.A - At).norm(), 0.0);
        EXPECT_EQ(s.nnz(), At.nonZeros());
    }
}

TEST(PatchTest, LinearOnDistortedMesh)
{
    const PolygonalMesh m = fixtures::distorted_quad_mesh(5, 0.08);
    PoissonProblem prob;
    prob.dirichlet = [](const Vec2& x) { return x.x() + 2 * x.y(); };
    const VemReport r = solve_poisson(m, prob, 1, {false});
    for (int v = 0; v < m.num_vertices(); ++v) {
        EXPECT_NEAR(r.solution[v], m.position(v).x() + 2 * m.position(v).y(), 1e-10);
    }
}

TEST(PatchTest, PolynomialsOfEveryOrder)
{
    const PolygonalMesh distorted = fixtures::distorted_quad_mesh(5, 0.08);
    AgglomerationConfig cfg;
    cfg.lambda = 1.0;
    const PolygonalMesh agglomerated = agglomerate(fixtures::tri_mesh(6, 6), cfg).mesh;
    for (const PolygonalMesh* m : {&distorted, &agglomerated}) {
        for (int k = 1; k <= 3; ++k) {
            const VemReport r = solve_poisson(*m, poly_problem(k), k, {false});
            EXPECT_LE(r.errors.l2, 1e-9) << "k=" << k;
            EXPECT_LE(r.errors.h1, 1e-9) << "k=" << k;
            EXPECT_LE(r.residual, 1e-12);
        }
    }
}

TEST(Convergence, SineProductRates)
{
    for (int k = 1; k <= 2; ++k) {
        std::vector<double> l2, h1;
        for (int n : {4, 8, 16}) {
            const VemReport r = solve_poisson(fixtures::quad_mesh(n, n), sine_problem(), k, {false});
            l2.push_back(r.errors.l2);
            h1.push_back(r.errors.h1);
        }
        for (int i = 0; i + 1 < 3; ++i) {
            EXPECT_NEAR(std::log2(h1[i] / h1[i + 1]), k, 0.15) << "k=" << k;
            EXPECT_NEAR(std::log2(l2[i] / l2[i + 1]), k + 1, 0.25) << "k=" << k;
        }
    }
}
