#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obt/kantorovich.hpp"
#include "obt/rng.hpp"
#include "oracles.hpp"

using namespace obt;

namespace {

ConvexObstacle unit_disk() { return ConvexObstacle::make_disk({0, 0}, 1.0); }

DiscreteMeasure equal_mass(std::vector<Vec2> atoms) {
    DiscreteMeasure m;
    m.weights.assign(atoms.size(), 1.0 / atoms.size());
    m.atoms = std::move(atoms);
    return m;
}

// Factorial brute force over assignments, accumulated in row order so the
// comparison with plan_cost is bitwise meaningful.
double brute_force_min_cost(const DiscreteMeasure& mu, const CostMatrix& c) {
    std::vector<int> perm(c.rows);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (size_t i = 0; i < c.rows; ++i) total += mu.weights[i] * c.at(i, perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

} // namespace

TEST_CASE("cost_matrix values and parallel/serial agreement") {
    auto obs = unit_disk();
    auto mu = equal_mass({{-2, 0}, {0, 2}});
    auto nu = equal_mass({{2, 0}, {3, 2}});

    auto c = cost_matrix(mu, nu, obs);
    auto cs = cost_matrix_serial(mu, nu, obs);
    REQUIRE(c.entries.size() == cs.entries.size());
    for (size_t k = 0; k < c.entries.size(); ++k) CHECK(c.entries[k] == cs.entries[k]);

    CHECK(c.at(0, 0) == doctest::Approx(2 * std::sqrt(3.0) + 3.14159265358979323846 / 3)
                            .epsilon(1e-12));
    CHECK(c.at(1, 1) == 3.0);  // clear pair at Euclidean distance 3

    // Symmetric instance: zero diagonal, symmetric matrix.
    auto cc = cost_matrix(mu, mu, obs);
    CHECK(cc.at(0, 0) == 0.0);
    CHECK(cc.at(1, 1) == 0.0);
    CHECK(cc.at(0, 1) == cc.at(1, 0));
}

TEST_CASE("solve_exact single atom") {
    auto obs = unit_disk();
    auto mu = equal_mass({{-2, 0}});
    auto nu = equal_mass({{2, 0}});
    auto c = cost_matrix(mu, nu, obs);
    auto res = solve_exact(mu, nu, c);
    REQUIRE(res.plan.couplings.size() == 1);
    CHECK(res.plan.couplings[0].i == 0);
    CHECK(res.plan.couplings[0].j == 0);
    CHECK(res.plan.couplings[0].mass == doctest::Approx(1.0));
    CHECK(plan_cost(res.plan, c) == doctest::Approx(geodesic_length(obs, {-2, 0}, {2, 0})));
    CHECK(duality_gap(res.plan, res.potential, mu, nu, c) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solve_exact picks the non-crossing matching around the disk") {
    auto obs = unit_disk();
    auto mu = equal_mass({{-2, 0.6}, {-2, -0.6}});
    auto nu = equal_mass({{2, 0.6}, {2, -0.6}});
    auto c = cost_matrix(mu, nu, obs);
    auto res = solve_exact(mu, nu, c);

    REQUIRE(res.plan.couplings.size() == 2);
    CHECK(res.plan.couplings[0].i == 0);
    CHECK(res.plan.couplings[0].j == 0);  // same-sign y matched
    CHECK(res.plan.couplings[1].i == 1);
    CHECK(res.plan.couplings[1].j == 1);

    CHECK(plan_cost(res.plan, c) == brute_force_min_cost(mu, c));
    CHECK(plan_cost(res.plan, c) ==
          doctest::Approx(geodesic_length(obs, {-2, 0.6}, {2, 0.6})).epsilon(1e-12));
}

TEST_CASE("solve_exact equals factorial brute force on random instances") {
    auto obs = unit_disk();
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng.below(7));  // 2..8
        std::vector<Vec2> a, b;
        for (int i = 0; i < n; ++i) {
            a.push_back(oracles::random_admissible_point(rng, obs, 1.05, 4.0));
            b.push_back(oracles::random_admissible_point(rng, obs, 1.05, 4.0));
        }
        auto mu = equal_mass(a);
        auto nu = equal_mass(b);
        auto c = cost_matrix(mu, nu, obs);
        auto res = solve_exact(mu, nu, c);

        CHECK(plan_cost(res.plan, c) == brute_force_min_cost(mu, c));
        CHECK(std::abs(duality_gap(res.plan, res.potential, mu, nu, c)) <= 1e-9);

        auto rows = res.plan.row_masses(n);
        auto cols = res.plan.col_masses(n);
        for (int i = 0; i < n; ++i) {
            CHECK(rows[i] == doctest::Approx(mu.weights[i]).epsilon(1e-10));
            CHECK(cols[i] == doctest::Approx(nu.weights[i]).epsilon(1e-10));
        }
        CHECK(res.plan.is_graph(n));
    }
}

TEST_CASE("solve_exact handles unequal weights") {
    auto obs = unit_disk();
    DiscreteMeasure mu, nu;
    mu.atoms = {{-3, 0}, {-2, 2}};
    mu.weights = {0.7, 0.3};
    nu.atoms = {{2, 0}, {3, 1}, {2, -2}};
    nu.weights = {0.3, 0.3, 0.4};

    auto c = cost_matrix(mu, nu, obs);
    auto res = solve_exact(mu, nu, c);
    auto rows = res.plan.row_masses(2);
    auto cols = res.plan.col_masses(3);
    CHECK(rows[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(rows[1] == doctest::Approx(0.3).epsilon(1e-12));
    for (size_t j = 0; j < 3; ++j)
        CHECK(cols[j] == doctest::Approx(nu.weights[j]).epsilon(1e-12));
    CHECK(std::abs(duality_gap(res.plan, res.potential, mu, nu, c)) <= 1e-9);
}

TEST_CASE("solve_exact rejects mass mismatch") {
    auto obs = unit_disk();
    DiscreteMeasure mu, nu;
    mu.atoms = {{-2, 0}};
    mu.weights = {1.0};
    nu.atoms = {{2, 0}};
    nu.weights = {0.5};
    auto c = cost_matrix(mu, nu, obs);
    CHECK_THROWS_AS(solve_exact(mu, nu, c), Error);
}

TEST_CASE("duality_gap detects suboptimal plans and infeasible duals") {
    auto obs = unit_disk();
    auto mu = equal_mass({{-2, 0.6}, {-2, -0.6}});
    auto nu = equal_mass({{2, 0.6}, {2, -0.6}});
    auto c = cost_matrix(mu, nu, obs);
    auto res = solve_exact(mu, nu, c);

    TransportPlan crossed;
    crossed.couplings = {{0, 1, 0.5}, {1, 0, 0.5}};
    double gap = duality_gap(crossed, res.potential, mu, nu, c);
    CHECK(gap > 1e-6);

    Potential bad = res.potential;
    bad.phi[0] += 1.0;
    CHECK_THROWS_AS(duality_gap(res.plan, bad, mu, nu, c), Error);
}

TEST_CASE("cyclical monotonicity checker") {
    auto obs = ConvexObstacle::make_disk({0, -50}, 0.25);  // effectively no obstacle

    std::vector<std::pair<Vec2, Vec2>> identity = {{{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}};
    CHECK(check_cyclical_monotonicity(identity, obs, 4, 200, 1e-9).empty());

    // Euclidean crossing: swapping saves 4 - 2 = 2.
    std::vector<std::pair<Vec2, Vec2>> crossing = {{{0, 0}, {2, 0}}, {{1, 0}, {-1, 0}}};
    auto violations = check_cyclical_monotonicity(crossing, obs, 4, 200, 1e-9);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].deficit == doctest::Approx(-2.0));

    // Support of an exact solve passes.
    auto disk = unit_disk();
    Rng rng(8);
    std::vector<Vec2> a, b;
    for (int i = 0; i < 12; ++i) {
        a.push_back(oracles::random_admissible_point(rng, disk, 1.05, 4.0));
        b.push_back(oracles::random_admissible_point(rng, disk, 1.05, 4.0));
    }
    auto mu = equal_mass(a);
    auto nu = equal_mass(b);
    auto c = cost_matrix(mu, nu, disk);
    auto res = solve_exact(mu, nu, c);
    std::vector<std::pair<Vec2, Vec2>> support;
    for (const auto& cp : res.plan.couplings)
        support.push_back({mu.atoms[cp.i], nu.atoms[cp.j]});
    CHECK(check_cyclical_monotonicity(support, disk, 4, 1000, 1e-7).empty());
}

TEST_CASE("plan_cost simple values") {
    CostMatrix c;
    c.rows = c.cols = 1;
    c.entries = {3.0};
    TransportPlan p;
    p.couplings = {{0, 0, 1.0}};
    CHECK(plan_cost(p, c) == 3.0);

    TransportPlan empty;
    CHECK(plan_cost(empty, c) == 0.0);
}
