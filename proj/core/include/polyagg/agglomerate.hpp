#pragma once

#include "polyagg/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace polyagg {

/// How the pairwise term charges neighboring cells with different labels.
///   literal: 1 only when the cells the two labels refer to are themselves adjacent
///   potts:   1 whenever the labels differ
enum class SmoothnessMode { literal, potts };

std::string to_string(SmoothnessMode mode);
SmoothnessMode parse_smoothness_mode(const std::string& text);

struct AgglomerationConfig {
    double lambda = 0.25;
    SmoothnessMode sc_mode = SmoothnessMode::potts;
    int max_cycles = 50;
    /// Integerization factor for the costs; 0 selects the number of mesh cells.
    std::int64_t cost_scale = 0;
    double collinear_tol = kCollinearTol;
};

/// Label per cell. Label l refers to cell l of the mesh the labeling was created for.
using Labeling = std::vector<int>;

Labeling trivial_labeling(int num_cells);

struct EnergyBreakdown {
    std::int64_t data_term = 0;
    std::int64_t smooth_term = 0;  // number of charged adjacent pairs
    std::int64_t total = 0;        // data_term + round(lambda * cost_scale) * smooth_term
    int iterations = 0;
};

struct SwapResult {
    std::int64_t delta = 0;  // energy change, never positive
    int relabeled = 0;
};

/// Precomputed integer energy of a mesh: union qualities of every adjacent pair are
/// evaluated once, so data costs are lookups afterwards. Immutable after construction
/// and safe to share between threads.
class AgglomerationEnergy {
public:
    AgglomerationEnergy(const PolygonalMesh& mesh, const AgglomerationConfig& config);

    const PolygonalMesh& mesh() const { return *mesh_; }
    const AgglomerationConfig& config() const { return config_; }
    std::int64_t cost_scale() const { return scale_; }
    std::int64_t smooth_weight() const { return smooth_weight_; }

    /// 0 for the cell's own label, 1 - rho(union) for an adjacent cell's label,
    /// 1 otherwise.
    double data_cost(int cell, int label) const;
    std::int64_t integer_data_cost(int cell, int label) const;
    int smoothness_cost(int l1, int l2) const;

    EnergyBreakdown evaluate(const Labeling& labeling) const;

    /// Optimal alpha-beta swap by one binary min-cut. Leaves the labeling untouched
    /// unless the energy strictly decreases.
    SwapResult swap_move(Labeling& labeling, int alpha, int beta) const;

    /// Swap move with the member lists of alpha and beta supplied (and kept up to date).
    SwapResult swap_move(Labeling& labeling, int alpha, int beta, std::vector<int>& alpha_cells,
                         std::vector<int>& beta_cells) const;

private:
    const PolygonalMesh* mesh_;
    AgglomerationConfig config_;
    std::int64_t scale_;
    std::int64_t smooth_weight_;
    std::vector<std::vector<double>> pair_cost_;  // parallel to mesh.neighbors(c)
};

double data_cost(const PolygonalMesh& mesh, int cell, int label,
                 double tol = kCollinearTol);
int smoothness_cost(const PolygonalMesh& mesh, int l1, int l2,
                    SmoothnessMode mode = SmoothnessMode::literal);
EnergyBreakdown energy(const PolygonalMesh& mesh, const Labeling& labeling,
                       const AgglomerationConfig& config);
SwapResult swap_move(const PolygonalMesh& mesh, Labeling& labeling, int alpha, int beta,
                     const AgglomerationConfig& config);

struct MinimizeResult {
    Labeling labeling;
    std::vector<EnergyBreakdown> history;  // initial energy, then one entry per cycle
    std::vector<std::int64_t> move_deltas;  // every swap move performed
    int cycles = 0;
};

/// Alpha-beta swap minimization from the trivial labeling. A cycle visits, in ascending
/// order, every label pair (alpha, beta) for which some cell could move between them
/// at less than maximal cost; it stops after a cycle with no decrease.
MinimizeResult minimize(const AgglomerationEnergy& problem);
MinimizeResult minimize(const PolygonalMesh& mesh, const AgglomerationConfig& config);

struct ApplyResult {
    PolygonalMesh mesh;
    std::vector<std::string> warnings;
};

/// Merges every edge-connected component of every label class, then merges aligned
/// edges. Components whose union is invalid (hole, pinch, swallowed constraint) are
/// kept as separate cells and reported in `warnings`.
ApplyResult apply_labeling(const PolygonalMesh& mesh, const Labeling& labeling,
                           double tol = kCollinearTol);

struct ReductionStats {
    int cells_before = 0;
    int cells_after = 0;
    int edges_before = 0;
    int edges_after = 0;
    int vertices_before = 0;
    int vertices_after = 0;
    std::int64_t energy_before = 0;
    std::int64_t energy_after = 0;
    /// (E_before - E_after) / E_before, 0 when E_before is 0.
    double energy_saved() const;
};

struct AgglomerationResult {
    PolygonalMesh mesh;
    Labeling labeling;
    std::vector<EnergyBreakdown> history;
    ReductionStats stats;
    std::vector<std::string> warnings;
};

AgglomerationResult agglomerate(const PolygonalMesh& mesh, const AgglomerationConfig& config);

}  // namespace polyagg
