#include "polyagg/agglomerate.hpp"

#include "polyagg/maxflow.hpp"
#include "polyagg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace polyagg {

std::string to_string(SmoothnessMode mode)
{
    return mode == SmoothnessMode::literal ? "literal" : "potts";
}

SmoothnessMode parse_smoothness_mode(const std::string& text)
{
    if (text == "literal") return SmoothnessMode::literal;
    if (text == "potts") return SmoothnessMode::potts;
    throw InputError("unknown smoothness mode '" + text + "' (expected literal or potts)");
}

Labeling trivial_labeling(int num_cells)
{
    Labeling l(num_cells);
    std::iota(l.begin(), l.end(), 0);
    return l;
}

namespace {

double union_cost(const PolygonalMesh& mesh, int a, int b, double tol)
{
    const int pair[2] = {a, b};
    try {
        const Cell merged = merge_cells(mesh, pair);
        const auto boundary = drop_aligned_vertices(mesh, merged.boundary, pair, tol);
        Polygon poly;
        poly.reserve(boundary.size());
        for (int v : boundary) poly.push_back(mesh.position(v));
        return 1.0 - quality(poly, tol).rho;
    } catch (const MergeError&) {
        return 1.0;
    }
}

void check_labeling(const PolygonalMesh& mesh, const Labeling& labeling)
{
    if (static_cast<int>(labeling.size()) != mesh.num_cells()) {
        throw InputError("labeling size does not match the number of cells");
    }
    for (int l : labeling) {
        if (l < 0 || l >= mesh.num_cells()) {
            throw InputError("label " + std::to_string(l) + " is not a cell index");
        }
    }
}

}  // namespace

AgglomerationEnergy::AgglomerationEnergy(const PolygonalMesh& mesh,
                                         const AgglomerationConfig& config)
    : mesh_(&mesh), config_(config)
{
    if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) {
        throw InputError("lambda must lie in [0, 1]");
    }
    if (config.max_cycles <= 0) throw InputError("max_cycles must be positive");
    if (config.cost_scale < 0 ||
        (config.cost_scale > 0 && config.cost_scale < mesh.num_cells())) {
        throw InputError("cost_scale must be at least the number of cells");
    }
    scale_ = config.cost_scale > 0 ? config.cost_scale : std::max(1, mesh.num_cells());
    smooth_weight_ = std::llround(config.lambda * static_cast<double>(scale_));

    pair_cost_.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto nb = mesh.neighbors(c);
        pair_cost_[c].resize(nb.size());
        for (std::size_t i = 0; i < nb.size(); ++i) {
            if (nb[i] < c) {
                // Symmetric: reuse the value computed from the other side.
                const auto other = mesh.neighbors(nb[i]);
                const auto pos = std::lower_bound(other.begin(), other.end(), c) - other.begin();
                pair_cost_[c][i] = pair_cost_[nb[i]][pos];
            } else {
                pair_cost_[c][i] = union_cost(mesh, c, nb[i], config.collinear_tol);
            }
        }
    }
}

double AgglomerationEnergy::data_cost(int cell, int label) const
{
    if (cell == label) return 0.0;
    const auto nb = mesh_->neighbors(cell);
    const auto it = std::lower_bound(nb.begin(), nb.end(), label);
    if (it == nb.end() || *it != label) return 1.0;
    return pair_cost_[cell][it - nb.begin()];
}

std::int64_t AgglomerationEnergy::integer_data_cost(int cell, int label) const
{
    if (cell == label) return 0;
    return std::llround(data_cost(cell, label) * static_cast<double>(scale_));
}

int AgglomerationEnergy::smoothness_cost(int l1, int l2) const
{
    if (l1 == l2) return 0;
    if (config_.sc_mode == SmoothnessMode::potts) return 1;
    return mesh_->adjacent(l1, l2) ? 1 : 0;
}

EnergyBreakdown AgglomerationEnergy::evaluate(const Labeling& labeling) const
{
    check_labeling(*mesh_, labeling);
    EnergyBreakdown e;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        e.data_term += integer_data_cost(c, labeling[c]);
        for (int nb : mesh_->neighbors(c)) {
            if (nb > c) e.smooth_term += smoothness_cost(labeling[c], labeling[nb]);
        }
    }
    e.total = e.data_term + smooth_weight_ * e.smooth_term;
    return e;
}

SwapResult AgglomerationEnergy::swap_move(Labeling& labeling, int alpha, int beta) const
{
    check_labeling(*mesh_, labeling);
    std::vector<int> a_cells, b_cells;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        if (labeling[c] == alpha) a_cells.push_back(c);
        if (labeling[c] == beta) b_cells.push_back(c);
    }
    return swap_move(labeling, alpha, beta, a_cells, b_cells);
}

SwapResult AgglomerationEnergy::swap_move(Labeling& labeling, int alpha, int beta,
                                          std::vector<int>& alpha_cells,
                                          std::vector<int>& beta_cells) const
{
    if (alpha == beta) throw InputError("swap move needs two distinct labels");
    std::vector<int> active;
    active.reserve(alpha_cells.size() + beta_cells.size());
    std::merge(alpha_cells.begin(), alpha_cells.end(), beta_cells.begin(), beta_cells.end(),
               std::back_inserter(active));
    if (active.empty()) return {};

    auto local = [&](int c) -> int {
        const auto it = std::lower_bound(active.begin(), active.end(), c);
        return (it != active.end() && *it == c) ? static_cast<int>(it - active.begin()) : -1;
    };

    const std::int64_t pair_cap = smooth_weight_ * smoothness_cost(alpha, beta);
    FlowNetwork net(static_cast<int>(active.size()));
    std::int64_t current = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
        const int c = active[i];
        std::int64_t cost_alpha = integer_data_cost(c, alpha);
        std::int64_t cost_beta = integer_data_cost(c, beta);
        for (int nb : mesh_->neighbors(c)) {
            const int j = local(nb);
            if (j < 0) {
                cost_alpha += smooth_weight_ * smoothness_cost(alpha, labeling[nb]);
                cost_beta += smooth_weight_ * smoothness_cost(beta, labeling[nb]);
            } else if (j > static_cast<int>(i)) {
                net.add_edge(static_cast<int>(i), j, pair_cap, pair_cap);
                if (labeling[c] != labeling[nb]) current += pair_cap;
            }
        }
        // Source side means alpha: a source-side node cuts its sink link.
        net.add_terminal(static_cast<int>(i), cost_beta, cost_alpha);
        current += labeling[c] == alpha ? cost_alpha : cost_beta;
    }
    const FlowNetwork::Cut cut = net.min_cut();
    if (cut.value >= current) return {};

    SwapResult result;
    result.delta = cut.value - current;
    alpha_cells.clear();
    beta_cells.clear();
    for (std::size_t i = 0; i < active.size(); ++i) {
        const int label = cut.source_side[i] ? alpha : beta;
        if (labeling[active[i]] != label) ++result.relabeled;
        labeling[active[i]] = label;
        (label == alpha ? alpha_cells : beta_cells).push_back(active[i]);
    }
    return result;
}

double data_cost(const PolygonalMesh& mesh, int cell, int label, double tol)
{
    if (cell == label) return 0.0;
    if (!mesh.adjacent(cell, label)) return 1.0;
    return union_cost(mesh, cell, label, tol);
}

int smoothness_cost(const PolygonalMesh& mesh, int l1, int l2, SmoothnessMode mode)
{
    if (l1 == l2) return 0;
    if (mode == SmoothnessMode::potts) return 1;
    return mesh.adjacent(l1, l2) ? 1 : 0;
}

EnergyBreakdown energy(const PolygonalMesh& mesh, const Labeling& labeling,
                       const AgglomerationConfig& config)
{
    return AgglomerationEnergy(mesh, config).evaluate(labeling);
}

SwapResult swap_move(const PolygonalMesh& mesh, Labeling& labeling, int alpha, int beta,
                     const AgglomerationConfig& config)
{
    return AgglomerationEnergy(mesh, config).swap_move(labeling, alpha, beta);
}

namespace {

std::vector<std::pair<int, int>> candidate_pairs(const PolygonalMesh& mesh,
                                                 const Labeling& labeling)
{
    std::vector<std::pair<int, int>> pairs;
    auto add = [&](int a, int b) {
        if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
    };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int l = labeling[c];
        add(l, c);  // return to its own label
        for (int nb : mesh.neighbors(c)) {
            add(l, nb);             // take a neighbor's label
            add(l, labeling[nb]);   // join or leave a neighboring label class
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

}  // namespace

MinimizeResult minimize(const AgglomerationEnergy& problem)
{
    const PolygonalMesh& mesh = problem.mesh();
    MinimizeResult result;
    result.labeling = trivial_labeling(mesh.num_cells());
    std::vector<std::vector<int>> members(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) members[c] = {c};

    EnergyBreakdown e = problem.evaluate(result.labeling);
    result.history.push_back(e);
    for (int cycle = 1; cycle <= problem.config().max_cycles; ++cycle) {
        std::int64_t decrease = 0;
        for (const auto& [alpha, beta] : candidate_pairs(mesh, result.labeling)) {
            if (members[alpha].empty() && members[beta].empty()) continue;
            const SwapResult r =
                problem.swap_move(result.labeling, alpha, beta, members[alpha], members[beta]);
            if (r.delta != 0) {
                result.move_deltas.push_back(r.delta);
                decrease -= r.delta;
            }
        }
        result.cycles = cycle;
        e = problem.evaluate(result.labeling);
        e.iterations = cycle;
        result.history.push_back(e);
        if (decrease == 0) break;
    }
    return result;
}

MinimizeResult minimize(const PolygonalMesh& mesh, const AgglomerationConfig& config)
{
    return minimize(AgglomerationEnergy(mesh, config));
}

ApplyResult apply_labeling(const PolygonalMesh& mesh, const Labeling& labeling, double tol)
{
    check_labeling(mesh, labeling);
    const int n = mesh.num_cells();
    std::vector<int> component(n, -1);
    std::vector<std::vector<int>> groups;
    for (int c = 0; c < n; ++c) {
        if (component[c] >= 0) continue;
        std::vector<int> group{c};
        component[c] = static_cast<int>(groups.size());
        for (std::size_t head = 0; head < group.size(); ++head) {
            for (int nb : mesh.neighbors(group[head])) {
                if (component[nb] < 0 && labeling[nb] == labeling[c]) {
                    component[nb] = component[c];
                    group.push_back(nb);
                }
            }
        }
        std::sort(group.begin(), group.end());
        groups.push_back(std::move(group));
    }

    ApplyResult result;
    std::vector<std::vector<int>> cells;
    cells.reserve(groups.size());
    for (const auto& group : groups) {
        if (group.size() == 1) {
            cells.push_back(mesh.cells()[group[0]].boundary);
            continue;
        }
        try {
            cells.push_back(merge_cells(mesh, group).boundary);
        } catch (const MergeError& err) {
            result.warnings.push_back("label " + std::to_string(labeling[group[0]]) +
                                      ": merge of " + std::to_string(group.size()) +
                                      " cells skipped (" + err.what() + ")");
            for (int c : group) cells.push_back(mesh.cells()[c].boundary);
        }
    }
    const PolygonalMesh merged =
        build_compacted_mesh(mesh.vertices(), cells, mesh.constrained_edges());
    result.mesh = simplify_aligned_edges(merged, tol);
    return result;
}

double ReductionStats::energy_saved() const
{
    if (energy_before == 0) return 0.0;
    return static_cast<double>(energy_before - energy_after) / static_cast<double>(energy_before);
}

AgglomerationResult agglomerate(const PolygonalMesh& mesh, const AgglomerationConfig& config)
{
    const AgglomerationEnergy problem(mesh, config);
    MinimizeResult min = minimize(problem);
    ApplyResult applied = apply_labeling(mesh, min.labeling, config.collinear_tol);

    AgglomerationResult result;
    result.stats.cells_before = mesh.num_cells();
    result.stats.edges_before = mesh.num_edges();
    result.stats.vertices_before = mesh.num_vertices();
    result.stats.cells_after = applied.mesh.num_cells();
    result.stats.edges_after = applied.mesh.num_edges();
    result.stats.vertices_after = applied.mesh.num_vertices();
    result.stats.energy_before = min.history.front().total;
    result.stats.energy_after = min.history.back().total;
    result.mesh = std::move(applied.mesh);
    result.labeling = std::move(min.labeling);
    result.history = std::move(min.history);
    result.warnings = std::move(applied.warnings);
    return result;
}

}  // namespace polyagg
