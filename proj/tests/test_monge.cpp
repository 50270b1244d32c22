#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obt/monge.hpp"
#include "obt/rng.hpp"
#include "oracles.hpp"

using namespace obt;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kPi = 3.14159265358979323846;

ConvexObstacle unit_disk() { return ConvexObstacle::make_disk({0, 0}, 1.0); }
ConvexObstacle far_obstacle() { return ConvexObstacle::make_disk({0, -100}, 0.5); }

DiscreteMeasure equal_mass(std::vector<Vec2> atoms) {
    DiscreteMeasure m;
    m.weights.assign(atoms.size(), 1.0 / atoms.size());
    m.atoms = std::move(atoms);
    return m;
}

struct Full {
    ConvexObstacle obs;
    DiscreteMeasure mu, nu;
    CostMatrix c;
    SolveResult solved;
    NodeSet nodes;
    RayRelation g;
    TransportSets sets;
    ChainPartition part;
    std::vector<ClassDecomposition> classes;
    std::vector<std::vector<AssignedPair>> assignments;
    MongeMap map;
    VerificationReport report;
};

Full run_full(ConvexObstacle obs, DiscreteMeasure mu, DiscreteMeasure nu, int k) {
    Full f{std::move(obs), std::move(mu), std::move(nu), {}, {}, {},
           {},             {},            {},            {}, {}, {}, {}};
    f.c = cost_matrix(f.mu, f.nu, f.obs);
    f.solved = solve_exact(f.mu, f.nu, f.c);
    f.nodes = build_nodes(f.mu, f.nu, f.solved.plan, f.solved.potential, f.obs, k);
    f.g = build_G(f.nodes, f.obs, geometry_eps(f.nodes.scale));
    f.sets = transport_sets(f.g);
    f.part = chains(f.g, f.sets);
    f.classes = decompose_classes(f.solved.plan, f.nodes, f.part, f.obs);
    for (const auto& cls : f.classes)
        f.assignments.push_back(cls.arc.kind == ClassKind::Boundary
                                    ? monotone_map_on_class(cls)
                                    : straight_class_map(cls));
    f.map = glue_maps(f.assignments, f.mu, f.nu, f.solved.plan, f.nodes);
    auto structure =
        check_structure(f.nodes, f.g, f.sets, f.part, f.solved.plan, f.obs, 1e-7);
    f.report = verify_map(f.map, f.assignments, f.classes, f.mu, f.nu, f.solved.plan,
                          f.solved.potential, f.c, structure, f.obs, 1e-7, 1e-7);
    return f;
}

} // namespace

TEST_CASE("single clear segment gives a straight class") {
    auto f = run_full(far_obstacle(), equal_mass({{0, 0}}), equal_mass({{2, 0}}), 4);
    REQUIRE(f.classes.size() == 1);
    CHECK(f.classes[0].arc.kind == ClassKind::Straight);
    CHECK(f.map.assignment[0] == 0);
    CHECK(f.report.pass());
}

TEST_CASE("wrap class boundary curve and contact indices") {
    // Source on the arc midpoint (0,1) plus the canonical wrap pair.
    auto f = run_full(unit_disk(), equal_mass({{-2, 0}, {0, 1}}),
                      equal_mass({{2, 0}, {2, 0.3}}), 8);
    REQUIRE(f.classes.size() == 1);
    const auto& cls = f.classes[0];
    CHECK(cls.arc.kind == ClassKind::Boundary);
    CHECK(cls.arc.orientation == -1);  // top arc walked with theta decreasing
    CHECK(cls.arc.theta_z == doctest::Approx(2 * kPi / 3).epsilon(1e-9));
    CHECK(cls.arc.theta_w == doctest::Approx(kPi / 3).epsilon(1e-9));
    CHECK(cls.arc.span == doctest::Approx(kPi / 3).epsilon(1e-9));

    for (const auto& m : cls.sources) {
        if (m.atom == 0) {  // (-2, 0): enters at the arc start
            CHECK(m.t == doctest::Approx(0.0));
            CHECK(m.s == doctest::Approx(-kSqrt3).epsilon(1e-12));
        } else {  // (0, 1): on M at the arc midpoint
            CHECK(m.t == doctest::Approx(0.5).epsilon(1e-9));
            CHECK(std::abs(m.s) < 1e-12);
        }
    }
    for (const auto& m : cls.targets) {
        if (m.atom == 0) {  // (2, 0): leaves at the arc end
            CHECK(m.t == doctest::Approx(1.0));
            CHECK(m.s == doctest::Approx(kSqrt3).epsilon(1e-12));
        }
    }
    CHECK(f.report.pass());
    CHECK(f.report.hourglass_violations == 0);
}

TEST_CASE("two wrap geodesics over the same side form one class with a union arc") {
    auto f = run_full(unit_disk(), equal_mass({{-2, 0.1}, {-2.4, 0.3}}),
                      equal_mass({{2, 0.12}, {2.4, 0.35}}), 8);
    REQUIRE(f.classes.size() == 1);
    CHECK(f.classes[0].arc.kind == ClassKind::Boundary);
    CHECK(f.classes[0].sources.size() == 2);
    CHECK(f.report.pass());

    // The plan is a graph on this class and every key-monotone matching has
    // the plan's cost; the pairing itself may differ when the class ties.
    CHECK(f.report.cost_map == doctest::Approx(f.report.cost_plan).epsilon(1e-12));
}

TEST_CASE("monotone_map_on_class matches sorted hourglass keys") {
    ClassDecomposition cls;
    cls.label = 3;
    cls.arc.kind = ClassKind::Boundary;
    cls.arc.orientation = 1;
    cls.arc.span = 1.0;
    cls.sources = {{0, 0, 0.4, -1.0, 0.5, 0.0, false}, {1, 1, 0.1, -2.0, 0.5, 0.0, false}};
    cls.targets = {{0, 0, 0.9, 2.0, 0.5, 0.0, false}, {1, 1, 0.5, 1.0, 0.5, 0.0, false}};

    auto pairs = monotone_map_on_class(cls);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].mu_atom == 1);  // t = 0.1 -> t = 0.5
    CHECK(pairs[0].nu_atom == 1);
    CHECK(pairs[1].mu_atom == 0);  // t = 0.4 -> t = 0.9
    CHECK(pairs[1].nu_atom == 0);
    for (const auto& p : pairs) CHECK(p.t_source <= p.t_target + 1e-12);

    ClassDecomposition single;
    single.arc.kind = ClassKind::Boundary;
    single.sources = {{0, 7, 0.8, -1.0, 1.0, 0.0, false}};
    single.targets = {{0, 2, 0.1, 1.0, 1.0, 0.0, false}};
    auto one = monotone_map_on_class(single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].mu_atom == 7);
    CHECK(one[0].nu_atom == 2);

    ClassDecomposition bad = cls;
    bad.targets.pop_back();
    CHECK_THROWS_AS(monotone_map_on_class(bad), Error);

    ClassDecomposition unbalanced = cls;
    unbalanced.sources[0].mass = 0.7;
    unbalanced.targets[0].mass = 0.7;
    CHECK_THROWS_AS(monotone_map_on_class(unbalanced), Error);
}

TEST_CASE("straight classes use the 1D monotone rearrangement") {
    // Sources at x = 0, 2; targets at 1, 3 on one line.
    auto f = run_full(far_obstacle(), equal_mass({{0, 0}, {2, 0}}),
                      equal_mass({{1, 0}, {3, 0}}), 4);
    CHECK(f.map.assignment[0] == 0);
    CHECK(f.map.assignment[1] == 1);
    CHECK(f.report.cost_map == doctest::Approx(1.0).epsilon(1e-12));  // (1 + 1) / 2
    CHECK(f.report.pass());

    // Disjoint rays on one line: 0 -> 2 and 10 -> 13.
    auto g = run_full(far_obstacle(), equal_mass({{0, 0}, {10, 0}}),
                      equal_mass({{2, 0}, {13, 0}}), 4);
    CHECK(g.map.assignment[0] == 0);
    CHECK(g.map.assignment[1] == 1);
    CHECK(g.report.pass());
}

TEST_CASE("identity instance maps every atom to itself at cost zero") {
    auto atoms = std::vector<Vec2>{{2, 1}, {-2, 0.5}, {0, 3}};
    auto f = run_full(unit_disk(), equal_mass(atoms), equal_mass(atoms), 6);
    for (size_t i = 0; i < atoms.size(); ++i) {
        CHECK(f.map.assignment[i] == static_cast<int>(i));
        CHECK(f.map.provenance[i] == -1);
    }
    CHECK(f.report.cost_map == 0.0);
    CHECK(f.report.fixed_points == 3);
    CHECK(f.report.pass());
}

TEST_CASE("glue rejects incomplete partitions") {
    auto f = run_full(far_obstacle(), equal_mass({{0, 0}, {2, 0}}),
                      equal_mass({{1, 0}, {3, 0}}), 4);
    std::vector<std::vector<AssignedPair>> missing(f.assignments.begin(),
                                                   f.assignments.end() - 1);
    if (f.assignments.size() == 1) {
        auto only = f.assignments[0];
        only.pop_back();
        missing = {only};
    }
    CHECK_THROWS_AS(glue_maps(missing, f.mu, f.nu, f.solved.plan, f.nodes), Error);
}

TEST_CASE("verification flags a cross-class swap") {
    Rng rng(12);
    auto obs = unit_disk();
    std::vector<Vec2> src, dst;
    for (int i = 0; i < 16; ++i) {
        src.push_back({rng.uniform(-3.2, -1.4), rng.uniform(-1.4, 1.4)});
        dst.push_back({rng.uniform(1.4, 3.2), rng.uniform(-1.4, 1.4)});
    }
    auto f = run_full(obs, equal_mass(src), equal_mass(dst), 8);
    REQUIRE(f.report.pass());

    // Swap two assignments with different provenance.
    MongeMap tampered = f.map;
    int a = -1, b = -1;
    for (size_t i = 0; i < tampered.assignment.size() && b < 0; ++i)
        for (size_t j = i + 1; j < tampered.assignment.size(); ++j)
            if (tampered.provenance[i] != tampered.provenance[j]) {
                a = static_cast<int>(i);
                b = static_cast<int>(j);
                break;
            }
    REQUIRE(a >= 0);
    std::swap(tampered.assignment[a], tampered.assignment[b]);

    auto broken = verify_map(tampered, f.assignments, f.classes, f.mu, f.nu, f.solved.plan,
                             f.solved.potential, f.c, f.report.structure, f.obs, 1e-7, 1e-7);
    CHECK(broken.cost_gap > 1e-7);
    CHECK(broken.graph_in_g_violations >= 1);
    CHECK_FALSE(broken.pass());
}

TEST_CASE("end-to-end wrap instance satisfies the transport-map identity") {
    Rng rng(4);
    auto obs = unit_disk();
    std::vector<Vec2> src, dst;
    for (int i = 0; i < 40; ++i) {
        src.push_back({rng.uniform(-3.5, -1.3), rng.uniform(-1.5, 1.5)});
        dst.push_back({rng.uniform(1.3, 3.5), rng.uniform(-1.5, 1.5)});
    }
    auto f = run_full(obs, equal_mass(src), equal_mass(dst), 8);

    CHECK(std::abs(f.report.cost_gap) <= 1e-7 * (1.0 + f.report.cost_plan));
    CHECK(f.report.pushforward_ok);
    CHECK(f.report.graph_in_g_violations == 0);
    CHECK(f.report.monotonicity_violations == 0);
    CHECK(f.report.hourglass_violations == 0);
    CHECK(f.report.structure.all_ok());
    CHECK(f.report.pass());

    bool has_boundary = false;
    for (const auto& cls : f.classes)
        has_boundary |= cls.arc.kind == ClassKind::Boundary;
    CHECK(has_boundary);
}
