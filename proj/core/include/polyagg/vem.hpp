#pragma once

#include "polyagg/mesh.hpp"
#include "polyagg/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace polyagg {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

inline constexpr int kMaxOrder = 3;

/// Scaled monomials ((x - x_E) / h_E)^a ((y - y_E) / h_E)^b with a + b <= degree, ordered
/// by total degree and, within a degree, by decreasing a. The first dimension(d) entries
/// span the polynomials of degree d.
class MonomialBasis {
public:
    MonomialBasis() = default;
    MonomialBasis(int degree, const Vec2& center, double h);

    static int dimension(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }

    int degree() const { return degree_; }
    int size() const { return dimension(degree_); }
    const Vec2& center() const { return center_; }
    double h() const { return h_; }
    const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }

    /// Index of the monomial with the given exponents, or -1 when out of range.
    int index(int a, int b) const;

    Eigen::VectorXd values(const Vec2& x) const;
    /// Row i holds the gradient of monomial i.
    Eigen::Matrix<double, Eigen::Dynamic, 2> gradients(const Vec2& x) const;

private:
    int degree_ = 0;
    Vec2 center_ = Vec2::Zero();
    double h_ = 1.0;
    std::vector<std::array<int, 2>> exponents_;
};

/// Local DOF layout of an order-k cell with n vertices: n vertex values, then (k - 1)
/// Gauss-Lobatto values per edge (edge i runs from vertex i to vertex i + 1, points in that
/// direction), then the k(k - 1)/2 moments (1/|E|) (v, m) against the monomials of
/// degree k - 2.
struct LocalLayout {
    int order = 1;
    int num_vertices = 0;

    int per_edge() const { return order - 1; }
    int num_moments() const { return MonomialBasis::dimension(order - 2); }
    int edge_offset(int edge) const { return num_vertices + edge * per_edge(); }
    int moment_offset() const { return num_vertices * order; }
    int size() const { return num_vertices * order + num_moments(); }
};

/// Projector matrices of one cell. Columns run over local DOFs, rows over monomials.
struct VemElement {
    int order = 1;
    LocalLayout layout;
    Polygon polygon;
    double area = 0.0;
    MonomialBasis basis;
    PlaneRule quadrature;           // exact to degree 2k + 2
    std::vector<Vec2> dof_points;   // vertex and edge DOF positions, in layout order

    Eigen::MatrixXd D;              // dof_i(m_j)
    Eigen::MatrixXd B;
    Eigen::MatrixXd G;              // B D
    Eigen::MatrixXd pi_nabla;       // coefficients of the H1 projection of each basis function
    Eigen::MatrixXd H;              // (m_i, m_j)_E, degree k
    Eigen::MatrixXd C;
    Eigen::MatrixXd pi_0;           // coefficients of the L2 projection onto degree k
    Eigen::MatrixXd pi_0_low;       // L2 projection onto degree k - 1
    std::array<Eigen::MatrixXd, 2> pi_0_grad;  // L2 projection of d/dx, d/dy onto degree k - 1

    int size() const { return layout.size(); }
};

/// Builds every projector of an order-k cell. Throws NumericalError naming `cell_id` when a
/// local Gram matrix is singular.
VemElement local_projectors(std::span<const Vec2> polygon, int k, int cell_id = -1);

/// Consistency (K Pi0 grad u, Pi0 grad v)_E plus the dof-dof stabilization scaled by the
/// spectral norm of K. Throws InputError for a K that is not symmetric positive definite.
Eigen::MatrixXd local_stiffness(const VemElement& element, const Eigen::Matrix2d& K);
Eigen::MatrixXd consistency_matrix(const VemElement& element, const Eigen::Matrix2d& K);

/// (f, Pi0_{k-1} phi_i)_E for every local basis function.
Eigen::VectorXd local_load(const VemElement& element, const ScalarField& f);

/// Local DOF values of a smooth function: point values and quadrature moments.
Eigen::VectorXd interpolate(const VemElement& element, const ScalarField& u);

/// Spectral norms ||Pi_nabla D - I|| and ||Pi_0 D - I||.
struct ProjectorDiscrepancy {
    double nabla = 0.0;
    double l2 = 0.0;
};
ProjectorDiscrepancy projector_discrepancy(const VemElement& element);

/// Global numbering over one or more meshes. Vertices are identified through caller-provided
/// global vertex ids; edge DOFs are shared by every cell edge joining the same pair of
/// global vertices and are ordered from the lower to the higher global vertex id; moments
/// belong to a single cell.
class DofMap {
public:
    int order() const { return order_; }
    int num_dofs() const { return num_dofs_; }
    int num_vertex_dofs() const { return num_vertex_dofs_; }
    int num_blocks() const { return static_cast<int>(cell_dofs_.size()); }
    std::span<const int> cell_dofs(int block, int cell) const { return cell_dofs_[block][cell]; }
    /// True for DOFs lying on an edge with a single incident cell.
    const std::vector<bool>& boundary() const { return boundary_; }

    friend DofMap build_dof_map(std::span<const PolygonalMesh* const> meshes,
                                std::span<const std::vector<int>> global_vertices, int k);

private:
    int order_ = 1;
    int num_dofs_ = 0;
    int num_vertex_dofs_ = 0;
    std::vector<std::vector<std::vector<int>>> cell_dofs_;
    std::vector<bool> boundary_;
};

/// Multi-mesh numbering. global_vertices[b][v] is the global vertex id of vertex v of mesh b;
/// boundary flags are combined over identified entities.
DofMap build_dof_map(std::span<const PolygonalMesh* const> meshes,
                     std::span<const std::vector<int>> global_vertices, int k);
DofMap build_dof_map(const PolygonalMesh& mesh, int k);

std::vector<VemElement> build_elements(const PolygonalMesh& mesh, int k);

/// One mesh of a (possibly multi-mesh) problem with constant diffusion tensor.
struct MeshBlock {
    const PolygonalMesh* mesh = nullptr;
    const std::vector<VemElement>* elements = nullptr;
    Eigen::Matrix2d K = Eigen::Matrix2d::Identity();
    ScalarField source;     // empty means f = 0
    ScalarField dirichlet;  // values imposed on boundary DOFs; empty means Neumann
    /// Optional selection of Dirichlet boundary edges by endpoint positions.
    std::function<bool(const Vec2&, const Vec2&)> dirichlet_edge;
};

/// Reduced symmetric system after Dirichlet elimination.
struct SparseSpdSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    std::vector<int> free_dofs;     // global DOF of each reduced unknown
    std::vector<bool> fixed;        // per global DOF
    Eigen::VectorXd fixed_values;   // per global DOF, zero where free
    int num_dofs = 0;

    long nnz() const { return static_cast<long>(A.nonZeros()); }
};

SparseSpdSystem assemble(std::span<const MeshBlock> blocks, const DofMap& dofs);

struct SolveInfo {
    double residual = 0.0;  // ||A x - b|| / ||b|| on the reduced system
    int refinement_steps = 0;
};

/// Sparse Cholesky solve with iterative refinement. Returns the full DOF vector (Dirichlet
/// values included). Throws NumericalError when the factorization breaks down.
Eigen::VectorXd solve_spd(const SparseSpdSystem& system, SolveInfo* info = nullptr);

struct ConditionEstimate {
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double cond = 0.0;
    bool converged = false;
};

/// Power iteration for the largest eigenvalue, inverse iteration through a Cholesky factor
/// for the smallest; both stop at a relative change below `tol`.
ConditionEstimate condition_estimate(const Eigen::SparseMatrix<double>& A, double tol = 1e-4,
                                     int max_iterations = 5000);

struct ErrorNorms {
    double l2 = 0.0;       // ||u - Pi0_k u_h||
    double h1 = 0.0;       // ||grad u - Pi0_{k-1} grad u_h||
    double l2_exact = 0.0; // ||u||
    double h1_exact = 0.0; // ||grad u||
};

/// Errors of one block. `solution` is the full global DOF vector.
ErrorNorms error_norms(const MeshBlock& block, const DofMap& dofs, int block_id,
                       const Eigen::VectorXd& solution, const ScalarField& u,
                       const VectorField& grad_u);

/// Combined norms of several blocks (square roots of summed squares).
ErrorNorms combine(std::span<const ErrorNorms> parts);

/// Single-mesh Poisson problem -div(K grad u) = f with Dirichlet data on the whole boundary.
struct PoissonProblem {
    Eigen::Matrix2d K = Eigen::Matrix2d::Identity();
    ScalarField source;
    ScalarField dirichlet;
    ScalarField exact;          // optional
    VectorField exact_gradient; // optional
};

struct VemReport {
    int order = 1;
    int cells = 0;
    int dofs = 0;
    long nnz = 0;
    double cond = 0.0;
    bool cond_converged = false;
    double residual = 0.0;
    ErrorNorms errors;
    double max_pi_nabla = 0.0;
    double max_pi_0 = 0.0;
    Eigen::VectorXd solution;
};

struct VemOptions {
    bool estimate_condition = true;
};

VemReport solve_poisson(const PolygonalMesh& mesh, const PoissonProblem& problem, int k,
                        const VemOptions& options = {});

/// Per-cell Pi0_k u_h evaluated at the cell centroid (for visualization).
std::vector<double> cell_values(const std::vector<VemElement>& elements, const DofMap& dofs,
                                int block_id, const Eigen::VectorXd& solution);

}  // namespace polyagg
