#include "obt/kantorovich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "obt/rng.hpp"

namespace obt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMassEps = 1e-13;
} // namespace

CostMatrix cost_matrix_serial(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const ConvexObstacle& obs) {
    CostMatrix c;
    c.rows = mu.size();
    c.cols = nu.size();
    c.entries.resize(c.rows * c.cols);
    for (size_t i = 0; i < c.rows; ++i)
        for (size_t j = 0; j < c.cols; ++j)
            c.at(i, j) = geodesic_length(obs, mu.atoms[i], nu.atoms[j]);
    return c;
}

CostMatrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const ConvexObstacle& obs) {
    CostMatrix c;
    c.rows = mu.size();
    c.cols = nu.size();
    c.entries.resize(c.rows * c.cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(c.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (size_t j = 0; j < c.cols; ++j)
            c.at(static_cast<size_t>(i), j) = geodesic_length(obs, mu.atoms[i], nu.atoms[j]);
    return c;
}

std::vector<double> TransportPlan::row_masses(size_t n) const {
    std::vector<double> out(n, 0.0);
    for (const auto& c : couplings) out[c.i] += c.mass;
    return out;
}

std::vector<double> TransportPlan::col_masses(size_t m) const {
    std::vector<double> out(m, 0.0);
    for (const auto& c : couplings) out[c.j] += c.mass;
    return out;
}

bool TransportPlan::is_graph(size_t n) const {
    std::vector<int> count(n, 0);
    for (const auto& c : couplings)
        if (++count[c.i] > 1) return false;
    for (int k : count)
        if (k == 0) return false;
    return true;
}

SolveResult solve_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const CostMatrix& cost) {
    const size_t n = mu.size();
    const size_t m = nu.size();
    if (cost.rows != n || cost.cols != m)
        throw Error("solve_exact: cost matrix shape mismatch");
    if (std::abs(mu.total_mass() - nu.total_mass()) > 1e-12)
        throw Error("solve_exact: marginal masses differ beyond 1e-12");

    std::vector<double> flow(n * m, 0.0);
    std::vector<double> rs = mu.weights;  // residual supply
    std::vector<double> rd = nu.weights;  // residual demand
    std::vector<double> hs(n, 0.0), ht(m, 0.0);  // Johnson potentials

    const size_t nodes = n + m;  // 0..n-1 sources, n..n+m-1 sinks
    std::vector<double> dist(nodes);
    std::vector<int> parent(nodes);
    std::vector<char> done(nodes);

    const long max_rounds = 8L * static_cast<long>(nodes) * static_cast<long>(nodes) + 64;
    long rounds = 0;

    for (size_t src = 0; src < n; ++src) {
        while (rs[src] > kMassEps) {
            if (++rounds > max_rounds)
                throw Error("solve_exact: augmentation limit exceeded");

            std::fill(dist.begin(), dist.end(), kInf);
            std::fill(parent.begin(), parent.end(), -1);
            std::fill(done.begin(), done.end(), 0);
            dist[src] = 0.0;

            // Dense Dijkstra on reduced costs; lowest index wins ties.
            for (;;) {
                size_t u = nodes;
                double best = kInf;
                for (size_t v = 0; v < nodes; ++v)
                    if (!done[v] && dist[v] < best) {
                        best = dist[v];
                        u = v;
                    }
                if (u == nodes) break;
                done[u] = 1;
                if (u < n) {
                    for (size_t j = 0; j < m; ++j) {
                        double rc = cost.at(u, j) + hs[u] - ht[j];
                        if (rc < 0.0) rc = 0.0;
                        if (dist[u] + rc < dist[n + j]) {
                            dist[n + j] = dist[u] + rc;
                            parent[n + j] = static_cast<int>(u);
                        }
                    }
                } else {
                    size_t j = u - n;
                    for (size_t i = 0; i < n; ++i) {
                        if (flow[i * m + j] <= kMassEps) continue;
                        double rc = ht[j] - hs[i] - cost.at(i, j);
                        if (rc < 0.0) rc = 0.0;
                        if (dist[u] + rc < dist[i]) {
                            dist[i] = dist[u] + rc;
                            parent[i] = static_cast<int>(u);
                        }
                    }
                }
            }

            size_t target = nodes;
            for (size_t j = 0; j < m; ++j)
                if (rd[j] > kMassEps && dist[n + j] < (target == nodes ? kInf : dist[target]))
                    target = n + j;
            if (target == nodes)
                throw Error("solve_exact: no augmenting path (infeasible marginals)");
            const double reach = dist[target];

            for (size_t i = 0; i < n; ++i) hs[i] += std::min(dist[i], reach);
            for (size_t j = 0; j < m; ++j) ht[j] += std::min(dist[n + j], reach);

            double delta = std::min(rs[src], rd[target - n]);
            for (size_t v = target; v != src;) {
                size_t p = static_cast<size_t>(parent[v]);
                if (v >= n)
                    ;  // forward arc p -> v, no capacity bound
                else
                    delta = std::min(delta, flow[v * m + (p - n)]);
                v = p;
            }
            for (size_t v = target; v != src;) {
                size_t p = static_cast<size_t>(parent[v]);
                if (v >= n)
                    flow[p * m + (v - n)] += delta;
                else
                    flow[v * m + (p - n)] -= delta;
                v = p;
            }
            rs[src] -= delta;
            rd[target - n] -= delta;
        }
    }

    SolveResult out;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            if (flow[i * m + j] > kMassEps)
                out.plan.couplings.push_back(
                    {static_cast<int>(i), static_cast<int>(j), flow[i * m + j]});

    // Duals from the Johnson potentials, then two c-transform passes. The
    // second pass makes psi 1-Lipschitz along the nu-atoms, which the ray
    // structure relies on when extending the potential off the atoms.
    std::vector<double> phi(n), psi(m);
    for (size_t i = 0; i < n; ++i) phi[i] = -hs[i];
    for (size_t j = 0; j < m; ++j) {
        double v = kInf;
        for (size_t i = 0; i < n; ++i) v = std::min(v, cost.at(i, j) - phi[i]);
        psi[j] = v;
    }
    for (size_t i = 0; i < n; ++i) {
        double v = kInf;
        for (size_t j = 0; j < m; ++j) v = std::min(v, cost.at(i, j) - psi[j]);
        phi[i] = v;
    }
    out.potential.phi = std::move(phi);
    out.potential.psi = std::move(psi);

    for (const auto& c : out.plan.couplings) {
        double slack = cost.at(c.i, c.j) - out.potential.phi[c.i] - out.potential.psi[c.j];
        if (std::abs(slack) > 1e-9)
            throw Error("solve_exact: complementary slackness violated after solve");
    }
    return out;
}

double plan_cost(const TransportPlan& plan, const CostMatrix& cost) {
    double total = 0.0;
    for (const auto& c : plan.couplings) total += c.mass * cost.at(c.i, c.j);
    return total;
}

namespace {

// Lazy pair-distance cache for cycle checks.
class PairCosts {
public:
    PairCosts(const std::vector<std::pair<Vec2, Vec2>>& pairs, const ConvexObstacle& obs)
        : pairs_(pairs), obs_(obs),
          cache_(pairs.size() * pairs.size(), std::numeric_limits<double>::quiet_NaN()) {}

    // d_M(x_a, y_b)
    double operator()(size_t a, size_t b) {
        double& slot = cache_[a * pairs_.size() + b];
        if (std::isnan(slot))
            slot = geodesic_length(obs_, pairs_[a].first, pairs_[b].second);
        return slot;
    }

private:
    const std::vector<std::pair<Vec2, Vec2>>& pairs_;
    const ConvexObstacle& obs_;
    std::vector<double> cache_;
};

double cycle_deficit(const std::vector<int>& cyc, PairCosts& d) {
    // sum d(x_{i+1}, y_i) - sum d(x_i, y_i); negative means a violation.
    double total = 0.0;
    for (size_t k = 0; k < cyc.size(); ++k) {
        size_t nxt = (k + 1) % cyc.size();
        total += d(cyc[nxt], cyc[k]) - d(cyc[k], cyc[k]);
    }
    return total;
}

std::vector<int> canonical_rotation(std::vector<int> cyc) {
    size_t best = 0;
    for (size_t k = 1; k < cyc.size(); ++k)
        if (cyc[k] < cyc[best]) best = k;
    std::rotate(cyc.begin(), cyc.begin() + best, cyc.end());
    return cyc;
}

} // namespace

std::vector<CycleViolation> check_cyclical_monotonicity(
    const std::vector<std::pair<Vec2, Vec2>>& pairs, const ConvexObstacle& obs,
    int k_max, int n_samples, double tol) {
    if (k_max < 2) throw Error("check_cyclical_monotonicity: k_max must be >= 2");
    const int np = static_cast<int>(pairs.size());
    std::vector<CycleViolation> out;
    if (np < 2) return out;

    PairCosts d(pairs, obs);
    std::set<std::vector<int>> seen;
    auto record = [&](const std::vector<int>& cyc, double deficit) {
        auto canon = canonical_rotation(cyc);
        if (seen.insert(canon).second) out.push_back({canon, deficit});
    };

    if (np <= 6) {
        // Exhaustive: every subset of size 2..np in every cyclic order
        // (first element fixed, the rest permuted).
        std::vector<int> subset;
        auto explore = [&](auto&& self, int start) -> void {
            if (subset.size() >= 2) {
                std::vector<int> rest(subset.begin() + 1, subset.end());
                std::sort(rest.begin(), rest.end());
                do {
                    std::vector<int> cyc = {subset[0]};
                    cyc.insert(cyc.end(), rest.begin(), rest.end());
                    double deficit = cycle_deficit(cyc, d);
                    if (deficit < -tol) record(cyc, deficit);
                } while (std::next_permutation(rest.begin(), rest.end()));
            }
            if (static_cast<int>(subset.size()) == np) return;
            for (int v = start; v < np; ++v) {
                subset.push_back(v);
                self(self, v + 1);
                subset.pop_back();
            }
        };
        explore(explore, 0);
    }

    Rng rng(0x0b5e55ed);  // fixed seed: reproducible reports
    std::vector<int> indices(np);
    std::iota(indices.begin(), indices.end(), 0);
    for (int s = 0; s < n_samples; ++s) {
        int k = 2 + static_cast<int>(rng.below(std::min(k_max, np) - 1));
        for (int pos = 0; pos < k; ++pos) {
            int swap_with = pos + static_cast<int>(rng.below(np - pos));
            std::swap(indices[pos], indices[swap_with]);
        }
        std::vector<int> cyc(indices.begin(), indices.begin() + k);
        double deficit = cycle_deficit(cyc, d);
        if (deficit < -tol) record(cyc, deficit);
    }
    return out;
}

double duality_gap(const TransportPlan& plan, const Potential& pot,
                   const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const CostMatrix& cost) {
    for (size_t i = 0; i < cost.rows; ++i)
        for (size_t j = 0; j < cost.cols; ++j)
            if (pot.phi[i] + pot.psi[j] > cost.at(i, j) + 1e-9)
                throw Error("duality_gap: potential is not dual feasible");
    double dual = 0.0;
    for (size_t i = 0; i < mu.size(); ++i) dual += pot.phi[i] * mu.weights[i];
    for (size_t j = 0; j < nu.size(); ++j) dual += pot.psi[j] * nu.weights[j];
    return plan_cost(plan, cost) - dual;
}

} // namespace obt
