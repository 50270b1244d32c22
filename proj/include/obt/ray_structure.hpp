#pragma once

#include <utility>
#include <vector>

#include "obt/geometry.hpp"
#include "obt/kantorovich.hpp"
#include "obt/measure.hpp"

namespace obt {

// A node of the finite ray universe: mu-atoms, nu-atoms, and sample points
// placed along the plan geodesics. Every node carries the plan geodesic it
// evolves along and its arc-length position on it.
struct RayNode {
    enum class Kind { MuAtom, NuAtom, Sample };

    Vec2 p;
    Kind kind = Kind::Sample;
    int atom = -1;      // atom index for atom nodes
    int coupling = -1;  // index into NodeSet::coupling_paths
    double arc_pos = 0.0;
    double potential = 0.0;  // Lipschitz potential u at p
};

struct NodeSet {
    std::vector<RayNode> nodes;
    std::vector<GeodesicPath> coupling_paths;  // one per plan coupling
    std::vector<int> mu_node;                  // mu-atom index -> node id
    std::vector<int> nu_node;                  // nu-atom index -> node id
    std::vector<int> coupling_mu_node;         // coupling -> mu endpoint node id
    std::vector<int> coupling_nu_node;         // coupling -> nu endpoint node id
    double scale = 0.0;                        // scene extent, tolerance base

    size_t size() const { return nodes.size(); }
};

// Builds the node universe. Atom nodes are assigned the geodesic of their
// highest-mass coupling (ties to the lowest opposite index); each coupling
// geodesic gets samples_per_geodesic interior sample nodes. The potential is
// evaluated once per node by the dual extension
//   u(p) = min_j ( d_M(p, y_j) - psi_j ),
// which restricts to phi on mu-atoms and to -psi on nu-atoms.
NodeSet build_nodes(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const TransportPlan& plan, const Potential& pot,
                    const ConvexObstacle& obs, int samples_per_geodesic);

// The dual extension u at an arbitrary admissible point.
double potential_at(const Vec2& p, const DiscreteMeasure& nu, const Potential& pot,
                    const ConvexObstacle& obs);

// Oriented transport-ray relation on the node universe:
//   (u, v) in G  iff  potential(u) - potential(v) = d_M(u, v) within tol.
// Edges at coincident positions (d <= strict_eps) are kept but flagged
// non-strict; transport sets and endpoints only count strict edges.
struct RayRelation {
    int n = 0;
    double tol = 0.0;
    double strict_eps = 0.0;
    std::vector<std::vector<int>> succ;          // G(u)
    std::vector<std::vector<char>> succ_strict;  // parallel to succ
    std::vector<std::vector<int>> pred;          // G^{-1}(u)
    std::vector<double> dist;                    // n*n cache; empty if too large

    bool has_dist() const { return !dist.empty(); }
    double dist_at(int u, int v) const { return dist[static_cast<size_t>(u) * n + v]; }
    size_t edge_count() const;
};

RayRelation build_G(const NodeSet& nodes, const ConvexObstacle& obs, double tol);
RayRelation build_G_serial(const NodeSet& nodes, const ConvexObstacle& obs, double tol);

// T: nodes with a strict predecessor and a strict successor. T_e: at least
// one of the two. a/b: T_e nodes with no strict predecessor / successor.
struct TransportSets {
    std::vector<char> in_T, in_Te, in_a, in_b;
    int count_T = 0, count_Te = 0, count_a = 0, count_b = 0;
};

TransportSets transport_sets(const RayRelation& g);

// Chain classes: connected components of T under R-edges whose endpoints
// both lie in T. Endpoint nodes are attached to the class of their lowest
// adjacent interior node for reporting only.
struct ChainPartition {
    std::vector<int> class_of;              // -1 for nodes outside T
    std::vector<int> attached;              // reporting attachment, -1 if none
    std::vector<std::vector<int>> classes;  // label -> T-nodes
};

ChainPartition chains(const RayRelation& g, const TransportSets& sets);
// Independent recomputation by BFS, used to cross-check the union-find route.
ChainPartition chains_bfs(const RayRelation& g, const TransportSets& sets);

// Zero-cost-cycle closure of a cyclically monotone pair set: adds (x, y)
// whenever a chain of at most I_max + 1 pairs closes a cycle of total cost 0
// within tol.
struct PairSet {
    std::vector<std::pair<Vec2, Vec2>> pairs;
};

PairSet gamma_prime_closure(const PairSet& gamma, const ConvexObstacle& obs,
                            int I_max, double tol);

// Transport-ray relation computed directly from a pair set: (u, v) is an
// edge iff some (w, z) satisfies d(w,u) + d(u,v) + d(v,z) = d(w,z) within
// tol. Quadratic in nodes times pairs; used to cross-validate build_G.
std::vector<std::pair<int, int>> relation_from_pairs(const std::vector<Vec2>& points,
                                                     const PairSet& gamma_prime,
                                                     const ConvexObstacle& obs, double tol);

// Partial-order and partition invariants of the ray structure, checked on
// every pipeline run: antisymmetry and transitivity of G at tolerance tol,
// T_e = T + a + b as a disjoint union, plan support contained in G, and
// union-find classes matching an independent BFS.
struct StructureCheck {
    bool antisymmetric_ok = true;
    bool transitive_ok = true;
    bool te_partition_ok = true;
    bool support_in_G_ok = true;
    bool bfs_matches = true;
    long antisym_violations = 0;
    long trans_violations = 0;
    long support_violations = 0;

    bool all_ok() const {
        return antisymmetric_ok && transitive_ok && te_partition_ok && support_in_G_ok &&
               bfs_matches;
    }
};

StructureCheck check_structure(const NodeSet& nodes, const RayRelation& g,
                               const TransportSets& sets, const ChainPartition& part,
                               const TransportPlan& plan, const ConvexObstacle& obs,
                               double tol);

// Arc-length translation along each node's assigned geodesic. t >= 0 moves
// forward along G, t < 0 backward along G^{-1}.
struct EvolveResult {
    bool ok = false;
    Vec2 point;
};

std::vector<EvolveResult> evolve(const NodeSet& nodes, const ConvexObstacle& obs,
                                 const std::vector<int>& ids, double t);

// Discrete stand-in for the non-degeneracy diagnostic: injectivity of the
// evolution, the distance/betweenness contract, and the evolvable fraction.
struct EvolutionReport {
    double t = 0.0;
    double evolvable_fraction = 0.0;
    bool injective = true;
    bool contract_ok = true;  // d(x, x_t) = |t| and betweenness on all evolved
    std::vector<int> unevolvable;
    std::vector<int> offenders;
};

std::vector<EvolutionReport> evolution_diagnostic(const NodeSet& nodes,
                                                  const ConvexObstacle& obs,
                                                  const std::vector<int>& A,
                                                  const std::vector<double>& t_list,
                                                  double tol);

} // namespace obt
