#include "obt/monge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace obt {

namespace {

struct Contact {
    double theta = 0.0;
    double u = 0.0;  // potential at the contact
};

bool path_has_arc(const GeodesicPath& path) {
    for (const auto& piece : path.pieces)
        if (piece.kind == GeodesicPath::PieceKind::Arc) return true;
    return false;
}

} // namespace

ClassArc class_boundary_curve(const std::vector<int>& couplings, const NodeSet& nodes,
                              const ConvexObstacle& obs, double order_tol) {
    ClassArc arc;

    int orientation = 0;
    std::vector<Contact> contacts;
    for (int k : couplings) {
        const auto& path = nodes.coupling_paths[k];
        auto fc = first_boundary_contact(obs, path);
        if (!fc) continue;
        auto lc = last_boundary_contact(obs, path);
        double u_start = nodes.nodes[nodes.coupling_mu_node[k]].potential;
        contacts.push_back({fc->theta, u_start - fc->path_pos});
        contacts.push_back({lc->theta, u_start - lc->path_pos});
        for (const auto& piece : path.pieces) {
            if (piece.kind != GeodesicPath::PieceKind::Arc) continue;
            if (orientation == 0)
                orientation = piece.orientation;
            else if (orientation != piece.orientation)
                throw Error("class boundary curve: members traverse the boundary in "
                            "opposite directions");
        }
    }

    if (orientation == 0) {
        arc.kind = ClassKind::Straight;
        return arc;
    }
    arc.kind = ClassKind::Boundary;
    arc.orientation = orientation;

    // gamma_y starts at the contact with the largest potential; offsets are
    // walked in the travel direction and must not contradict the potential
    // order (that would signal contacts spread over more than one arc).
    const Contact* anchor = &contacts.front();
    for (const auto& c : contacts)
        if (c.u > anchor->u) anchor = &c;
    arc.theta_z = anchor->theta;

    double span = 0.0;
    for (const auto& c : contacts)
        span = std::max(span, obs.arc_walk_length(arc.theta_z, c.theta, orientation));
    arc.span = span;
    arc.theta_w = obs.wrap_theta(arc.theta_z + orientation * span);

    std::vector<Contact> ordered = contacts;
    std::sort(ordered.begin(), ordered.end(), [&](const Contact& a, const Contact& b) {
        return obs.arc_walk_length(arc.theta_z, a.theta, orientation) <
               obs.arc_walk_length(arc.theta_z, b.theta, orientation);
    });
    for (size_t i = 0; i + 1 < ordered.size(); ++i)
        if (ordered[i].u < ordered[i + 1].u - order_tol)
            throw Error("class boundary curve: contacts are not contained in a single "
                        "arc consistent with the transport order");
    return arc;
}

ClassMember contact_index(int coupling, bool source_side, int atom, double mass,
                          const ClassArc& arc, const NodeSet& nodes,
                          const ConvexObstacle& obs) {
    ClassMember member;
    member.coupling = coupling;
    member.atom = atom;
    member.mass = mass;
    int atom_node = source_side ? nodes.coupling_mu_node[coupling]
                                : nodes.coupling_nu_node[coupling];
    member.key_u = nodes.nodes[atom_node].potential;

    const auto& path = nodes.coupling_paths[coupling];
    auto contact = source_side ? first_boundary_contact(obs, path)
                               : last_boundary_contact(obs, path);
    if (!contact) {
        member.rerouted = true;
        return member;
    }
    member.s = source_side ? -contact->path_pos : path.total_length - contact->path_pos;
    double offset = obs.arc_walk_length(arc.theta_z, contact->theta, arc.orientation);
    member.t = arc.span > 0.0 ? std::clamp(offset / arc.span, 0.0, 1.0) : 0.0;
    return member;
}

std::vector<ClassDecomposition> decompose_classes(const TransportPlan& plan,
                                                  const NodeSet& nodes,
                                                  const ChainPartition& part,
                                                  const ConvexObstacle& obs) {
    const double eps = geometry_eps(nodes.scale);
    const double order_tol = 1e-7 * (1.0 + nodes.scale);

    // Couplings inherit the class of their interior sample nodes.
    std::vector<int> coupling_class(plan.couplings.size(), -1);
    for (size_t v = 0; v < nodes.size(); ++v) {
        const RayNode& node = nodes.nodes[v];
        if (node.kind != RayNode::Kind::Sample) continue;
        int cls = part.class_of[static_cast<int>(v)];
        if (cls < 0) continue;
        int& slot = coupling_class[node.coupling];
        if (slot >= 0 && slot != cls)
            throw Error("decompose_classes: samples of one coupling fall in different "
                        "classes");
        slot = cls;
    }

    int next_label = static_cast<int>(part.classes.size());
    std::vector<std::vector<int>> members(next_label);
    for (size_t k = 0; k < plan.couplings.size(); ++k) {
        if (nodes.coupling_paths[k].total_length <= eps) continue;  // fixed point
        int cls = coupling_class[k];
        if (cls < 0) {
            // No interior node survived sampling; the coupling forms its own
            // class.
            members.emplace_back();
            cls = next_label++;
        }
        members[cls].push_back(static_cast<int>(k));
    }

    std::vector<ClassDecomposition> out;
    for (int label = 0; label < next_label; ++label) {
        if (members[label].empty()) continue;
        ClassDecomposition cls;
        cls.label = label;
        cls.arc = class_boundary_curve(members[label], nodes, obs, order_tol);
        for (int k : members[label]) {
            const auto& c = plan.couplings[k];
            if (cls.arc.kind == ClassKind::Boundary) {
                cls.sources.push_back(contact_index(k, true, c.i, c.mass, cls.arc, nodes, obs));
                cls.targets.push_back(contact_index(k, false, c.j, c.mass, cls.arc, nodes, obs));
            } else {
                ClassMember src{k, c.i, 0.0, 0.0, c.mass,
                                nodes.nodes[nodes.coupling_mu_node[k]].potential, false};
                ClassMember tgt{k, c.j, 0.0, 0.0, c.mass,
                                nodes.nodes[nodes.coupling_nu_node[k]].potential, false};
                cls.sources.push_back(src);
                cls.targets.push_back(tgt);
            }
        }
        for (const auto& m : cls.sources)
            if (m.rerouted) ++cls.rerouted_count;
        out.push_back(std::move(cls));
    }
    return out;
}

namespace {

void check_balance(const ClassDecomposition& cls) {
    if (cls.sources.size() != cls.targets.size())
        throw Error("class map: member counts differ between sides");
    double ms = 0.0, mt = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& m : cls.sources) {
        ms += m.mass;
        lo = std::min(lo, m.mass);
        hi = std::max(hi, m.mass);
    }
    for (const auto& m : cls.targets) mt += m.mass;
    if (std::abs(ms - mt) > 1e-10)
        throw Error("class map: class masses differ beyond 1e-10 (partition bug)");
    if (hi - lo > 1e-10)
        throw Error("class map: member masses are not uniform; rank matching needs the "
                    "equal-mass regime");
}

bool hourglass_less(const ClassMember& a, const ClassMember& b) {
    return std::tie(a.t, a.s, a.atom) < std::tie(b.t, b.s, b.atom);
}

// Transport order along a 1D class: the potential decreases along rays.
bool line_less(const ClassMember& a, const ClassMember& b) {
    return std::tie(b.key_u, a.atom) < std::tie(a.key_u, b.atom);
}

} // namespace

std::vector<AssignedPair> monotone_map_on_class(const ClassDecomposition& cls) {
    if (cls.arc.kind != ClassKind::Boundary)
        throw Error("monotone_map_on_class: class is not boundary kind");
    check_balance(cls);

    std::vector<ClassMember> src_touch, src_rest, tgt_touch, tgt_rest;
    for (const auto& m : cls.sources) (m.rerouted ? src_rest : src_touch).push_back(m);
    for (const auto& m : cls.targets) (m.rerouted ? tgt_rest : tgt_touch).push_back(m);
    if (src_touch.size() != tgt_touch.size())
        throw Error("monotone_map_on_class: touching pools are unbalanced");

    std::sort(src_touch.begin(), src_touch.end(), hourglass_less);
    std::sort(tgt_touch.begin(), tgt_touch.end(), hourglass_less);
    std::sort(src_rest.begin(), src_rest.end(), line_less);
    std::sort(tgt_rest.begin(), tgt_rest.end(), line_less);

    std::vector<AssignedPair> out;
    for (size_t k = 0; k < src_touch.size(); ++k)
        out.push_back({src_touch[k].atom, tgt_touch[k].atom, cls.label, true,
                       src_touch[k].t, tgt_touch[k].t});
    for (size_t k = 0; k < src_rest.size(); ++k)
        out.push_back({src_rest[k].atom, tgt_rest[k].atom, cls.label, false, 0.0, 0.0});
    return out;
}

std::vector<AssignedPair> straight_class_map(const ClassDecomposition& cls) {
    if (cls.arc.kind != ClassKind::Straight)
        throw Error("straight_class_map: class is not straight kind");
    check_balance(cls);

    // The members lie on one line geodesic up to the relation tolerance:
    // nearly tangent rays can chain at finite resolution. The potential
    // order is the 1D coordinate either way, and verify_map certifies every
    // matched pair against the metric afterwards.
    std::vector<ClassMember> src = cls.sources, tgt = cls.targets;
    std::sort(src.begin(), src.end(), line_less);
    std::sort(tgt.begin(), tgt.end(), line_less);

    std::vector<AssignedPair> out;
    for (size_t k = 0; k < src.size(); ++k)
        out.push_back({src[k].atom, tgt[k].atom, cls.label, false, 0.0, 0.0});
    return out;
}

MongeMap glue_maps(const std::vector<std::vector<AssignedPair>>& class_assignments,
                   const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const TransportPlan& plan, const NodeSet& nodes) {
    const double eps = geometry_eps(nodes.scale);
    MongeMap map;
    map.assignment.assign(mu.size(), -1);
    map.provenance.assign(mu.size(), -2);

    // Identity extension: atoms whose coupling does not move stay coupled to
    // their own location.
    for (size_t k = 0; k < plan.couplings.size(); ++k) {
        if (nodes.coupling_paths[k].total_length > eps) continue;
        const auto& c = plan.couplings[k];
        if (map.assignment[c.i] >= 0)
            throw Error("glue_maps: mu-atom " + std::to_string(c.i) + " assigned twice");
        map.assignment[c.i] = c.j;
        map.provenance[c.i] = -1;
    }

    for (const auto& pairs : class_assignments)
        for (const auto& p : pairs) {
            if (map.assignment[p.mu_atom] >= 0)
                throw Error("glue_maps: mu-atom " + std::to_string(p.mu_atom) +
                            " assigned twice");
            map.assignment[p.mu_atom] = p.nu_atom;
            map.provenance[p.mu_atom] = p.class_label;
        }

    for (size_t i = 0; i < mu.size(); ++i)
        if (map.assignment[i] < 0)
            throw Error("glue_maps: mu-atom " + std::to_string(i) +
                        " left unassigned (incomplete partition)");

    std::vector<int> used(nu.size(), 0);
    for (int j : map.assignment)
        if (++used[j] > 1)
            throw Error("glue_maps: map is not a bijection in the equal-mass regime");
    return map;
}

VerificationReport verify_map(const MongeMap& map,
                              const std::vector<std::vector<AssignedPair>>& class_assignments,
                              const std::vector<ClassDecomposition>& classes,
                              const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const TransportPlan& plan, const Potential& pot,
                              const CostMatrix& cost, const StructureCheck& structure,
                              const ConvexObstacle& obs, double tol_cost_rel,
                              double tol_potential) {
    VerificationReport rep;
    rep.structure = structure;
    rep.tol_cost_rel = tol_cost_rel;
    rep.tol_potential = tol_potential;
    rep.tol_hourglass = 1e-12;

    for (size_t i = 0; i < mu.size(); ++i)
        rep.cost_map += mu.weights[i] * cost.at(i, map.assignment[i]);
    rep.cost_plan = plan_cost(plan, cost);
    rep.cost_gap = rep.cost_map - rep.cost_plan;
    rep.cost_ok = std::abs(rep.cost_gap) <= tol_cost_rel * (1.0 + rep.cost_plan);

    auto image = pushforward(mu, [&](size_t i) { return nu.atoms[map.assignment[i]]; });
    rep.pushforward_ok = exact_equal(image, nu, 1e-12);

    for (size_t i = 0; i < mu.size(); ++i) {
        double slack = pot.phi[i] + pot.psi[map.assignment[i]] - cost.at(i, map.assignment[i]);
        if (std::abs(slack) > tol_potential) ++rep.graph_in_g_violations;
    }

    std::vector<std::pair<Vec2, Vec2>> graph;
    for (size_t i = 0; i < mu.size(); ++i)
        graph.push_back({mu.atoms[i], nu.atoms[map.assignment[i]]});
    rep.monotonicity_violations = static_cast<long>(
        check_cyclical_monotonicity(graph, obs, 4, 1000, tol_potential).size());

    for (const auto& pairs : class_assignments)
        for (const auto& p : pairs)
            if (p.boundary && p.t_source > p.t_target + rep.tol_hourglass)
                ++rep.hourglass_violations;

    for (int prov : map.provenance)
        if (prov == -1) ++rep.fixed_points;

    for (const auto& cls : classes) {
        ClassSummary s;
        s.label = cls.label;
        s.kind = cls.arc.kind;
        s.couplings = static_cast<int>(cls.sources.size());
        s.rerouted = cls.rerouted_count;
        s.theta_z = cls.arc.theta_z;
        s.theta_w = cls.arc.theta_w;
        s.span = cls.arc.span;
        s.orientation = cls.arc.orientation;
        rep.class_summaries.push_back(s);
    }
    for (const auto& pairs : class_assignments)
        for (const auto& p : pairs)
            for (auto& s : rep.class_summaries)
                if (s.label == p.class_label) {
                    s.cost_share += mu.weights[p.mu_atom] * cost.at(p.mu_atom, p.nu_atom);
                    break;
                }
    return rep;
}

} // namespace obt
