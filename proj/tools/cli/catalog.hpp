#pragma once

#include "polyagg/vem.hpp"

#include <string>
#include <vector>

namespace polyagg::cli {

/// Manufactured solution of -laplace(u) = f on planar meshes.
struct ManufacturedSolution {
    std::string id;
    int degree = -1;  // polynomial degree, -1 for non-polynomial solutions
    ScalarField u;
    VectorField grad;
    ScalarField f;
};

/// Ids: poly1, poly2, poly3, sin-product.
const std::vector<ManufacturedSolution>& solution_catalog();
/// Throws InputError listing the known ids.
const ManufacturedSolution& find_solution(const std::string& id);

PoissonProblem poisson_problem(const ManufacturedSolution& s);

}  // namespace polyagg::cli
