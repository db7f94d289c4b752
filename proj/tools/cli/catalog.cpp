#include "catalog.hpp"

#include "polyagg/errors.hpp"

#include <cmath>
#include <numbers>

namespace polyagg::cli {

const std::vector<ManufacturedSolution>& solution_catalog()
{
    using std::numbers::pi;
    static const std::vector<ManufacturedSolution> catalog{
        {"poly1", 1, [](const Vec2& p) { return 1.0 + 2.0 * p.x() - 3.0 * p.y(); },
         [](const Vec2&) { return Vec2(2.0, -3.0); }, [](const Vec2&) { return 0.0; }},
        {"poly2", 2,
         [](const Vec2& p) { return p.x() * p.x() - p.x() * p.y() + 2.0 * p.y() * p.y() + p.x(); },
         [](const Vec2& p) { return Vec2(2.0 * p.x() - p.y() + 1.0, -p.x() + 4.0 * p.y()); },
         [](const Vec2&) { return -6.0; }},
        {"poly3", 3,
         [](const Vec2& p) {
             const double x = p.x(), y = p.y();
             return x * x * x - 2.0 * x * x * y + y * y * y + x * y;
         },
         [](const Vec2& p) {
             const double x = p.x(), y = p.y();
             return Vec2(3.0 * x * x - 4.0 * x * y + y, -2.0 * x * x + 3.0 * y * y + x);
         },
         [](const Vec2& p) { return -6.0 * p.x() - 2.0 * p.y(); }},
        {"sin-product", -1, [](const Vec2& p) { return std::sin(pi * p.x()) * std::sin(pi * p.y()); },
         [](const Vec2& p) {
             return Vec2(pi * std::cos(pi * p.x()) * std::sin(pi * p.y()),
                         pi * std::sin(pi * p.x()) * std::cos(pi * p.y()));
         },
         [](const Vec2& p) { return 2.0 * pi * pi * std::sin(pi * p.x()) * std::sin(pi * p.y()); }},
    };
    return catalog;
}

const ManufacturedSolution& find_solution(const std::string& id)
{
    std::string known;
    for (const ManufacturedSolution& s : solution_catalog()) {
        if (s.id == id) return s;
        known += (known.empty() ? "" : ", ") + s.id;
    }
    throw InputError("unknown solution '" + id + "' (known: " + known + ")");
}

PoissonProblem poisson_problem(const ManufacturedSolution& s)
{
    PoissonProblem p;
    p.source = s.f;
    p.dirichlet = s.u;
    p.exact = s.u;
    p.exact_gradient = s.grad;
    return p;
}

}  // namespace polyagg::cli
