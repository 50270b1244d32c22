#pragma once

#include <vector>

#include "obt/kantorovich.hpp"
#include "obt/measure.hpp"
#include "obt/ray_structure.hpp"

namespace obt {

enum class ClassKind { Straight, Boundary };

// One side of one coupling inside a chain class, with its hourglass key.
// Touching members carry (t, s): t is the normalized position of the
// member's boundary contact along the class arc, s the signed arc length
// from the contact along its geodesic (negative upstream of M). Members of
// boundary classes whose geodesic never touches M are rerouted to a
// straight sub-pool ordered by the potential.
struct ClassMember {
    int coupling = -1;
    int atom = -1;
    double t = 0.0;
    double s = 0.0;
    double mass = 0.0;
    double key_u = 0.0;  // atom potential, the 1D coordinate for straight order
    bool rerouted = false;
};

// Boundary curve gamma_y of a class: the minimal covering arc of all member
// contacts, oriented so that the transport order increases along it.
struct ClassArc {
    ClassKind kind = ClassKind::Straight;
    double theta_z = 0.0;  // earliest contact in transport order
    double theta_w = 0.0;  // latest contact
    int orientation = 0;
    double span = 0.0;
};

struct ClassDecomposition {
    int label = -1;
    ClassArc arc;
    std::vector<ClassMember> sources;
    std::vector<ClassMember> targets;
    int rerouted_count = 0;
};

// Computes the class arc from the member couplings. Throws when the
// contacts do not fit a single consistently oriented arc (a sampling
// resolution artifact, reported rather than repaired).
ClassArc class_boundary_curve(const std::vector<int>& couplings, const NodeSet& nodes,
                              const ConvexObstacle& obs, double order_tol);

// Hourglass key of one coupling side within a boundary class.
ClassMember contact_index(int coupling, bool source_side, int atom, double mass,
                          const ClassArc& arc, const NodeSet& nodes,
                          const ConvexObstacle& obs);

// Groups the plan couplings by chain class (via their sample nodes),
// computes class arcs and member keys. Couplings without interior nodes
// become singleton classes; fixed-point couplings are left out entirely.
std::vector<ClassDecomposition> decompose_classes(const TransportPlan& plan,
                                                  const NodeSet& nodes,
                                                  const ChainPartition& part,
                                                  const ConvexObstacle& obs);

// A matched pair with the keys used, kept for the hourglass-order check.
struct AssignedPair {
    int mu_atom = -1;
    int nu_atom = -1;
    int class_label = -1;
    bool boundary = false;  // carries hourglass keys below
    double t_source = 0.0;
    double t_target = 0.0;
};

// Monotone coupling of a boundary class: sources and targets sorted by
// (t, s, atom id), matched rank by rank; rerouted members are matched among
// themselves by the potential coordinate.
std::vector<AssignedPair> monotone_map_on_class(const ClassDecomposition& cls);

// 1D monotone rearrangement of a straight class along its line, in the
// transport direction (the potential coordinate).
std::vector<AssignedPair> straight_class_map(const ClassDecomposition& cls);

struct MongeMap {
    std::vector<int> assignment;  // mu-atom index -> nu-atom index
    std::vector<int> provenance;  // class label, -1 for plan fixed points
};

// Union of the per-class assignments plus the identity extension on fixed
// points. Throws if some mu-atom is missed or assigned twice, or if the
// result is not a bijection (the equal-mass regime guarantees one).
MongeMap glue_maps(const std::vector<std::vector<AssignedPair>>& class_assignments,
                   const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const TransportPlan& plan, const NodeSet& nodes);

struct ClassSummary {
    int label = -1;
    ClassKind kind = ClassKind::Straight;
    int couplings = 0;
    int rerouted = 0;
    double theta_z = 0.0, theta_w = 0.0, span = 0.0;
    int orientation = 0;
    double cost_share = 0.0;
};

struct VerificationReport {
    double cost_map = 0.0;
    double cost_plan = 0.0;
    double cost_gap = 0.0;  // signed: cost_map - cost_plan
    bool cost_ok = false;
    bool pushforward_ok = false;
    long graph_in_g_violations = 0;
    long monotonicity_violations = 0;
    long hourglass_violations = 0;
    StructureCheck structure;
    std::vector<ClassSummary> class_summaries;
    int fixed_points = 0;

    double tol_cost_rel = 0.0;
    double tol_potential = 0.0;
    double tol_hourglass = 0.0;

    bool pass() const {
        return cost_ok && pushforward_ok && graph_in_g_violations == 0 &&
               monotonicity_violations == 0 && hourglass_violations == 0 &&
               structure.all_ok();
    }
};

// End-to-end certification of a glued map: cost identity against the plan,
// exact pushforward, the potential identity on every assigned pair, sampled
// cyclical monotonicity of the map graph, and the hourglass order.
VerificationReport verify_map(const MongeMap& map,
                              const std::vector<std::vector<AssignedPair>>& class_assignments,
                              const std::vector<ClassDecomposition>& classes,
                              const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const TransportPlan& plan, const Potential& pot,
                              const CostMatrix& cost, const StructureCheck& structure,
                              const ConvexObstacle& obs, double tol_cost_rel,
                              double tol_potential);

} // namespace obt
