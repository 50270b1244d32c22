#pragma once

#include <utility>
#include <vector>

#include "obt/geometry.hpp"
#include "obt/measure.hpp"

namespace obt {

// Pairwise d_M costs between mu-atoms (rows) and nu-atoms (columns).
struct CostMatrix {
    size_t rows = 0, cols = 0;
    std::vector<double> entries;  // row-major

    double at(size_t i, size_t j) const { return entries[i * cols + j]; }
    double& at(size_t i, size_t j) { return entries[i * cols + j]; }
};

// OpenMP-parallel assembly and the serial reference it is tested against.
CostMatrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const ConvexObstacle& obs);
CostMatrix cost_matrix_serial(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const ConvexObstacle& obs);

struct Coupling {
    int i = 0;
    int j = 0;
    double mass = 0.0;
};

struct TransportPlan {
    std::vector<Coupling> couplings;  // sorted by (i, j)

    std::vector<double> row_masses(size_t n) const;
    std::vector<double> col_masses(size_t m) const;
    // True iff every mu-atom ships to exactly one nu-atom.
    bool is_graph(size_t n) const;
};

// Kantorovich duals on atoms: phi_i + psi_j <= C_ij, tight on the support.
struct Potential {
    std::vector<double> phi;
    std::vector<double> psi;
};

struct SolveResult {
    TransportPlan plan;
    Potential potential;
};

// Exact transportation solve by successive shortest paths with node
// potentials. Deterministic: sources are drained in index order and Dijkstra
// ties break on the lowest node index. The returned duals are c-concave
// (re-tightened by two c-transform passes).
SolveResult solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostMatrix& cost);

double plan_cost(const TransportPlan& plan, const CostMatrix& cost);

struct CycleViolation {
    std::vector<int> pair_indices;  // indices into the checked pair list
    double deficit = 0.0;           // negative: how much the rewiring saves
};

// Samples cycles of length 2..k_max among the (x, y) pairs and reports any
// whose rewiring lowers total d_M cost by more than tol. All cycles are
// enumerated exhaustively when there are at most 6 pairs.
std::vector<CycleViolation> check_cyclical_monotonicity(
    const std::vector<std::pair<Vec2, Vec2>>& pairs, const ConvexObstacle& obs,
    int k_max, int n_samples, double tol);

// plan_cost minus the dual objective; throws if the potential is infeasible
// beyond 1e-9.
double duality_gap(const TransportPlan& plan, const Potential& pot,
                   const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const CostMatrix& cost);

} // namespace obt
