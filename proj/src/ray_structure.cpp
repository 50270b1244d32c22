#include "obt/ray_structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "obt/union_find.hpp"

namespace obt {

namespace {
// Above this node count the dense distance cache would not fit comfortably.
constexpr int kDistCacheLimit = 3000;
} // namespace

double potential_at(const Vec2& p, const DiscreteMeasure& nu, const Potential& pot,
                    const ConvexObstacle& obs) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < nu.size(); ++j)
        best = std::min(best, geodesic_length(obs, p, nu.atoms[j]) - pot.psi[j]);
    return best;
}

NodeSet build_nodes(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    const TransportPlan& plan, const Potential& pot,
                    const ConvexObstacle& obs, int samples_per_geodesic) {
    if (samples_per_geodesic < 0)
        throw Error("build_nodes: samples_per_geodesic must be >= 0");

    NodeSet out;
    out.scale = obs.extent();
    for (const auto& a : mu.atoms) out.scale = std::max({out.scale, std::abs(a.x), std::abs(a.y)});
    for (const auto& a : nu.atoms) out.scale = std::max({out.scale, std::abs(a.x), std::abs(a.y)});

    out.coupling_paths.reserve(plan.couplings.size());
    for (const auto& c : plan.couplings)
        out.coupling_paths.push_back(geodesic(obs, mu.atoms[c.i], nu.atoms[c.j]));

    // Atom ray assignment: highest-mass coupling, ties to the lowest
    // opposite-side index (couplings are sorted by (i, j)).
    std::vector<int> mu_pick(mu.size(), -1), nu_pick(nu.size(), -1);
    for (size_t k = 0; k < plan.couplings.size(); ++k) {
        const auto& c = plan.couplings[k];
        if (mu_pick[c.i] < 0 || c.mass > plan.couplings[mu_pick[c.i]].mass)
            mu_pick[c.i] = static_cast<int>(k);
        if (nu_pick[c.j] < 0 || c.mass > plan.couplings[nu_pick[c.j]].mass)
            nu_pick[c.j] = static_cast<int>(k);
    }

    out.mu_node.resize(mu.size());
    for (size_t i = 0; i < mu.size(); ++i) {
        RayNode node;
        node.p = mu.atoms[i];
        node.kind = RayNode::Kind::MuAtom;
        node.atom = static_cast<int>(i);
        node.coupling = mu_pick[i];
        node.arc_pos = 0.0;
        out.mu_node[i] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(node);
    }
    out.nu_node.resize(nu.size());
    for (size_t j = 0; j < nu.size(); ++j) {
        RayNode node;
        node.p = nu.atoms[j];
        node.kind = RayNode::Kind::NuAtom;
        node.atom = static_cast<int>(j);
        node.coupling = nu_pick[j];
        node.arc_pos = node.coupling >= 0 ? out.coupling_paths[node.coupling].total_length : 0.0;
        out.nu_node[j] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(node);
    }

    out.coupling_mu_node.resize(plan.couplings.size());
    out.coupling_nu_node.resize(plan.couplings.size());
    for (size_t k = 0; k < plan.couplings.size(); ++k) {
        out.coupling_mu_node[k] = out.mu_node[plan.couplings[k].i];
        out.coupling_nu_node[k] = out.nu_node[plan.couplings[k].j];
    }

    const double eps = geometry_eps(out.scale);
    for (size_t k = 0; k < out.coupling_paths.size(); ++k) {
        const auto& path = out.coupling_paths[k];
        if (path.total_length <= eps) continue;
        for (int s = 1; s <= samples_per_geodesic; ++s) {
            RayNode node;
            node.kind = RayNode::Kind::Sample;
            node.coupling = static_cast<int>(k);
            node.arc_pos = path.total_length * s / (samples_per_geodesic + 1);
            node.p = path_point(obs, path, node.arc_pos);
            out.nodes.push_back(node);
        }
    }

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.nodes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t v = 0; v < n; ++v)
        out.nodes[v].potential = potential_at(out.nodes[v].p, nu, pot, obs);
    return out;
}

namespace {

RayRelation build_G_impl(const NodeSet& nodes, const ConvexObstacle& obs, double tol,
                         bool parallel) {
    RayRelation g;
    g.n = static_cast<int>(nodes.size());
    g.tol = tol;
    g.strict_eps = geometry_eps(nodes.scale);
    g.succ.resize(g.n);
    g.succ_strict.resize(g.n);
    g.pred.resize(g.n);

    const bool cache = g.n <= kDistCacheLimit;
    if (cache) g.dist.assign(static_cast<size_t>(g.n) * g.n, 0.0);

    auto row = [&](int u) {
        for (int v = 0; v < g.n; ++v) {
            if (v == u) continue;
            double d = geodesic_length(obs, nodes.nodes[u].p, nodes.nodes[v].p);
            if (cache) g.dist[static_cast<size_t>(u) * g.n + v] = d;
            double residual = nodes.nodes[u].potential - nodes.nodes[v].potential - d;
            if (std::abs(residual) <= tol) {
                g.succ[u].push_back(v);
                g.succ_strict[u].push_back(d > g.strict_eps ? 1 : 0);
            }
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (int u = 0; u < g.n; ++u) row(u);
    } else {
        for (int u = 0; u < g.n; ++u) row(u);
    }

    for (int u = 0; u < g.n; ++u)
        for (int v : g.succ[u]) g.pred[v].push_back(u);
    return g;
}

} // namespace

RayRelation build_G(const NodeSet& nodes, const ConvexObstacle& obs, double tol) {
    return build_G_impl(nodes, obs, tol, true);
}

RayRelation build_G_serial(const NodeSet& nodes, const ConvexObstacle& obs, double tol) {
    return build_G_impl(nodes, obs, tol, false);
}

size_t RayRelation::edge_count() const {
    size_t total = 0;
    for (const auto& s : succ) total += s.size();
    return total;
}

TransportSets transport_sets(const RayRelation& g) {
    TransportSets sets;
    sets.in_T.assign(g.n, 0);
    sets.in_Te.assign(g.n, 0);
    sets.in_a.assign(g.n, 0);
    sets.in_b.assign(g.n, 0);

    std::vector<char> has_succ(g.n, 0), has_pred(g.n, 0);
    for (int u = 0; u < g.n; ++u)
        for (size_t k = 0; k < g.succ[u].size(); ++k)
            if (g.succ_strict[u][k]) {
                has_succ[u] = 1;
                has_pred[g.succ[u][k]] = 1;
            }

    for (int u = 0; u < g.n; ++u) {
        if (!has_succ[u] && !has_pred[u]) continue;  // isolated: not in T_e
        sets.in_Te[u] = 1;
        ++sets.count_Te;
        if (has_succ[u] && has_pred[u]) {
            sets.in_T[u] = 1;
            ++sets.count_T;
        } else if (!has_pred[u]) {
            sets.in_a[u] = 1;
            ++sets.count_a;
        } else {
            sets.in_b[u] = 1;
            ++sets.count_b;
        }
    }
    return sets;
}

namespace {

void finalize_partition(const RayRelation& g, const TransportSets& sets,
                        std::vector<int>& root_of, ChainPartition& part) {
    // Deterministic labels: classes numbered by their smallest node index.
    part.class_of.assign(g.n, -1);
    std::vector<int> label_of_root(g.n, -1);
    int next = 0;
    for (int u = 0; u < g.n; ++u) {
        if (!sets.in_T[u]) continue;
        int r = root_of[u];
        if (label_of_root[r] < 0) {
            label_of_root[r] = next++;
            part.classes.emplace_back();
        }
        part.class_of[u] = label_of_root[r];
        part.classes[label_of_root[r]].push_back(u);
    }

    part.attached.assign(g.n, -1);
    for (int u = 0; u < g.n; ++u) {
        if (sets.in_T[u]) {
            part.attached[u] = part.class_of[u];
            continue;
        }
        if (!sets.in_Te[u]) continue;
        int best = -1;
        for (int v : g.succ[u])
            if (sets.in_T[v] && (best < 0 || v < best)) best = v;
        for (int v : g.pred[u])
            if (sets.in_T[v] && (best < 0 || v < best)) best = v;
        if (best >= 0) part.attached[u] = part.class_of[best];
    }
}

} // namespace

ChainPartition chains(const RayRelation& g, const TransportSets& sets) {
    UnionFind uf(g.n);
    for (int u = 0; u < g.n; ++u) {
        if (!sets.in_T[u]) continue;
        for (int v : g.succ[u])
            if (sets.in_T[v]) uf.unite(u, v);
    }
    std::vector<int> root(g.n);
    for (int u = 0; u < g.n; ++u) root[u] = uf.find(u);

    ChainPartition part;
    finalize_partition(g, sets, root, part);
    return part;
}

ChainPartition chains_bfs(const RayRelation& g, const TransportSets& sets) {
    std::vector<int> root(g.n, -1);
    for (int start = 0; start < g.n; ++start) {
        if (!sets.in_T[start] || root[start] >= 0) continue;
        std::deque<int> queue{start};
        root[start] = start;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            auto visit = [&](int v) {
                if (sets.in_T[v] && root[v] < 0) {
                    root[v] = start;
                    queue.push_back(v);
                }
            };
            for (int v : g.succ[u]) visit(v);
            for (int v : g.pred[u]) visit(v);
        }
    }

    ChainPartition part;
    finalize_partition(g, sets, root, part);
    return part;
}

PairSet gamma_prime_closure(const PairSet& gamma, const ConvexObstacle& obs,
                            int I_max, double tol) {
    const size_t np = gamma.pairs.size();
    if (I_max < 0) throw Error("gamma_prime_closure: I_max must be >= 0");
    double work = 1.0;
    for (int i = 0; i <= I_max; ++i) work *= static_cast<double>(np);
    if (work > 2e6)
        throw Error("gamma_prime_closure: pair set too large for exhaustive closure");

    auto cmp = [](const std::pair<Vec2, Vec2>& a, const std::pair<Vec2, Vec2>& b) {
        if (a.first != b.first) return lex_less(a.first, b.first);
        return lex_less(a.second, b.second);
    };
    std::set<std::pair<Vec2, Vec2>, decltype(cmp)> result(cmp);
    for (const auto& p : gamma.pairs) result.insert(p);

    auto d = [&](const Vec2& a, const Vec2& b) { return geodesic_length(obs, a, b); };

    // Chains (w_0,z_0), ..., (w_I,z_I): cost sum_i d(w_{i+1}, z_i) - d(w_i, z_i)
    // with w_{I+1} = w_0; a zero-cost cycle contributes (w_0, z_I).
    std::vector<size_t> chain;
    auto extend = [&](auto&& self, double partial) -> void {
        const size_t depth = chain.size();
        if (depth >= 1 && static_cast<int>(depth) <= I_max + 1) {
            double closing = partial + d(gamma.pairs[chain[0]].first,
                                         gamma.pairs[chain[depth - 1]].second) -
                             d(gamma.pairs[chain[depth - 1]].first,
                               gamma.pairs[chain[depth - 1]].second);
            if (std::abs(closing) <= tol)
                result.insert({gamma.pairs[chain[0]].first, gamma.pairs[chain[depth - 1]].second});
        }
        if (static_cast<int>(depth) > I_max) return;
        for (size_t next = 0; next < np; ++next) {
            double step = 0.0;
            if (depth > 0)
                step = d(gamma.pairs[next].first, gamma.pairs[chain[depth - 1]].second) -
                       d(gamma.pairs[chain[depth - 1]].first,
                         gamma.pairs[chain[depth - 1]].second);
            chain.push_back(next);
            self(self, partial + step);
            chain.pop_back();
        }
    };
    extend(extend, 0.0);

    PairSet out;
    out.pairs.assign(result.begin(), result.end());
    return out;
}

std::vector<std::pair<int, int>> relation_from_pairs(const std::vector<Vec2>& points,
                                                     const PairSet& gamma_prime,
                                                     const ConvexObstacle& obs, double tol) {
    std::vector<std::pair<int, int>> edges;
    const int n = static_cast<int>(points.size());
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            double duv = geodesic_length(obs, points[u], points[v]);
            for (const auto& wz : gamma_prime.pairs) {
                double lhs = geodesic_length(obs, wz.first, points[u]) + duv +
                             geodesic_length(obs, points[v], wz.second);
                if (std::abs(lhs - geodesic_length(obs, wz.first, wz.second)) <= tol) {
                    edges.push_back({u, v});
                    break;
                }
            }
        }
    return edges;
}

StructureCheck check_structure(const NodeSet& nodes, const RayRelation& g,
                               const TransportSets& sets, const ChainPartition& part,
                               const TransportPlan& plan, const ConvexObstacle& obs,
                               double tol) {
    StructureCheck out;

    auto dist = [&](int u, int v) {
        return g.has_dist() ? g.dist_at(u, v)
                            : geodesic_length(obs, nodes.nodes[u].p, nodes.nodes[v].p);
    };

    // Antisymmetry: both orders in G force the nodes to coincide.
    for (int u = 0; u < g.n; ++u) {
        for (int v : g.succ[u]) {
            if (v <= u) continue;
            bool reversed = std::find(g.succ[v].begin(), g.succ[v].end(), u) != g.succ[v].end();
            if (reversed && dist(u, v) > tol) ++out.antisym_violations;
        }
    }
    out.antisymmetric_ok = out.antisym_violations == 0;

    // Transitivity through the potential identity at the looser tolerance.
    for (int y = 0; y < g.n; ++y) {
        if (g.pred[y].empty() || g.succ[y].empty()) continue;
        for (int x : g.pred[y])
            for (int z : g.succ[y]) {
                if (x == z) continue;
                double residual = nodes.nodes[x].potential - nodes.nodes[z].potential -
                                  dist(x, z);
                if (std::abs(residual) > tol) ++out.trans_violations;
            }
    }
    out.transitive_ok = out.trans_violations == 0;

    for (int u = 0; u < g.n; ++u) {
        int member = sets.in_T[u] + sets.in_a[u] + sets.in_b[u];
        if (sets.in_Te[u] ? member != 1 : member != 0) out.te_partition_ok = false;
        if (sets.in_a[u] && sets.in_b[u]) out.te_partition_ok = false;
    }

    for (const auto& c : plan.couplings) {
        int u = nodes.mu_node[c.i];
        int v = nodes.nu_node[c.j];
        if (distance(nodes.nodes[u].p, nodes.nodes[v].p) <= g.strict_eps) continue;
        if (std::find(g.succ[u].begin(), g.succ[u].end(), v) == g.succ[u].end())
            ++out.support_violations;
    }
    out.support_in_G_ok = out.support_violations == 0;

    ChainPartition independent = chains_bfs(g, sets);
    out.bfs_matches = independent.class_of == part.class_of;
    return out;
}

std::vector<EvolveResult> evolve(const NodeSet& nodes, const ConvexObstacle& obs,
                                 const std::vector<int>& ids, double t) {
    const double eps = geometry_eps(nodes.scale);
    std::vector<EvolveResult> out(ids.size());
    for (size_t k = 0; k < ids.size(); ++k) {
        const RayNode& node = nodes.nodes[ids[k]];
        if (node.coupling < 0) {
            out[k].ok = t == 0.0;
            out[k].point = node.p;
            continue;
        }
        const auto& path = nodes.coupling_paths[node.coupling];
        double pos = node.arc_pos + t;
        if (pos < -eps || pos > path.total_length + eps) {
            out[k].ok = false;
            out[k].point = node.p;
            continue;
        }
        out[k].ok = true;
        out[k].point = path_point(obs, path, std::clamp(pos, 0.0, path.total_length));
    }
    return out;
}

std::vector<EvolutionReport> evolution_diagnostic(const NodeSet& nodes,
                                                  const ConvexObstacle& obs,
                                                  const std::vector<int>& A,
                                                  const std::vector<double>& t_list,
                                                  double tol) {
    const double eps = geometry_eps(nodes.scale);
    std::vector<EvolutionReport> reports;
    for (double t : t_list) {
        EvolutionReport rep;
        rep.t = t;
        auto moved = evolve(nodes, obs, A, t);

        size_t ok_count = 0;
        for (size_t k = 0; k < A.size(); ++k) {
            if (!moved[k].ok) {
                rep.unevolvable.push_back(A[k]);
                continue;
            }
            ++ok_count;
            const RayNode& node = nodes.nodes[A[k]];
            double d = geodesic_length(obs, node.p, moved[k].point);
            bool fine = std::abs(d - std::abs(t)) <= tol;
            if (fine && node.coupling >= 0) {
                const auto& path = nodes.coupling_paths[node.coupling];
                fine = t >= 0.0
                           ? betweenness(obs, path.start, node.p, moved[k].point, path.end, tol)
                           : betweenness(obs, path.start, moved[k].point, node.p, path.end, tol);
            }
            if (!fine) {
                rep.contract_ok = false;
                rep.offenders.push_back(A[k]);
            }
        }
        rep.evolvable_fraction = A.empty() ? 1.0 : static_cast<double>(ok_count) / A.size();

        for (size_t a = 0; a < A.size() && rep.injective; ++a) {
            if (!moved[a].ok) continue;
            for (size_t b = a + 1; b < A.size(); ++b) {
                if (!moved[b].ok) continue;
                bool sources_distinct =
                    distance(nodes.nodes[A[a]].p, nodes.nodes[A[b]].p) > eps;
                if (sources_distinct && distance(moved[a].point, moved[b].point) <= eps) {
                    rep.injective = false;
                    rep.offenders.push_back(A[a]);
                    rep.offenders.push_back(A[b]);
                    break;
                }
            }
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

} // namespace obt
