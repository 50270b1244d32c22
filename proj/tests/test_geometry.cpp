#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "obt/geometry.hpp"
#include "obt/rng.hpp"
#include "oracles.hpp"

using namespace obt;

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kPi = 3.14159265358979323846;

ConvexObstacle unit_disk() { return ConvexObstacle::make_disk({0.0, 0.0}, 1.0); }

ConvexObstacle unit_square() {
    return ConvexObstacle::make_polygon({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}});
}

} // namespace

TEST_CASE("segment_clear on the unit disk") {
    auto obs = unit_disk();
    CHECK(segment_clear(obs, {0, 2}, {3, 2}));
    CHECK_FALSE(segment_clear(obs, {-2, 0}, {2, 0}));
    // Boundary contact only: X includes M.
    CHECK(segment_clear(obs, {-2, 0}, {-1, 0}));
    CHECK_THROWS_AS(segment_clear(obs, {0.0, 0.0}, {2, 0}), Error);
}

TEST_CASE("segment_clear on a square polygon") {
    auto obs = unit_square();
    CHECK_FALSE(segment_clear(obs, {-2, 0}, {2, 0}));
    CHECK(segment_clear(obs, {-2, 1.5}, {2, 1.5}));
    // Grazing exactly along the top edge is boundary contact, not blocking.
    CHECK(segment_clear(obs, {-2, 1.0}, {2, 1.0}));
    CHECK(segment_clear(obs, {-1, -2}, {-1, 2}));
    CHECK_THROWS_AS(segment_clear(obs, {0, 0}, {3, 0}), Error);
}

TEST_CASE("tangent_points on the unit disk match the tangency oracle") {
    auto obs = unit_disk();

    auto [a1, a2] = tangent_points(obs, {-2, 0});
    CHECK(a1.x == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(a1.y == doctest::Approx(kSqrt3 / 2).epsilon(1e-12));
    CHECK(a2.x == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(a2.y == doctest::Approx(-kSqrt3 / 2).epsilon(1e-12));

    auto [b1, b2] = tangent_points(obs, {0, 2});
    CHECK(b1.x == doctest::Approx(kSqrt3 / 2).epsilon(1e-12));
    CHECK(b1.y == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b2.x == doctest::Approx(-kSqrt3 / 2).epsilon(1e-12));
    CHECK(b2.y == doctest::Approx(0.5).epsilon(1e-12));

    // Oracle: the radius at a tangency point is orthogonal to the tangent
    // segment, and the segment is clear.
    Rng rng(17);
    for (int it = 0; it < 200; ++it) {
        Vec2 p = oracles::random_admissible_point(rng, obs, 1.2, 4.0);
        auto [q1, q2] = tangent_points(obs, p);
        for (const Vec2& q : {q1, q2}) {
            CHECK(std::abs(dot(q - obs.center(), q - p)) < 1e-12 * (1.0 + p.norm()));
            CHECK(segment_clear(obs, p, q));
        }
    }

    CHECK_THROWS_AS(tangent_points(obs, {0.5, 0.0}), Error);
    CHECK_THROWS_AS(tangent_points(obs, {1.0, 0.0}), Error);
}

TEST_CASE("tangent vertices of a polygon are the angular extremes") {
    auto obs = unit_square();
    auto [t1, t2] = tangent_points(obs, {-3, 0});
    CHECK(t1 == Vec2{-1, 1});   // ccw side (left of the ray towards the center) first
    CHECK(t2 == Vec2{-1, -1});

    // Brute-force oracle: extreme angular extent over all vertices.
    Rng rng(23);
    for (int it = 0; it < 200; ++it) {
        Vec2 p = oracles::random_admissible_point(rng, obs, 1.8, 5.0);
        auto [q1, q2] = tangent_points(obs, p);
        Vec2 ref = (obs.center() - p).normalized();
        double amax = -10, amin = 10;
        Vec2 vmax, vmin;
        for (const Vec2& v : obs.vertices()) {
            double ang = std::atan2(cross(ref, v - p), dot(ref, v - p));
            if (ang > amax) { amax = ang; vmax = v; }
            if (ang < amin) { amin = ang; vmin = v; }
        }
        CHECK(q1 == vmax);
        CHECK(q2 == vmin);
    }
}

TEST_CASE("geodesic around the unit disk: canonical wrap") {
    auto obs = unit_disk();
    auto path = geodesic(obs, {-2, 0}, {2, 0});

    CHECK(path.total_length == doctest::Approx(2 * kSqrt3 + kPi / 3).epsilon(1e-12));
    REQUIRE(path.pieces.size() == 3);
    CHECK(path.pieces[0].kind == GeodesicPath::PieceKind::Segment);
    CHECK(path.pieces[1].kind == GeodesicPath::PieceKind::Arc);
    CHECK(path.pieces[2].kind == GeodesicPath::PieceKind::Segment);

    // Tie between the two sides resolved to the upper (counterclockwise) one.
    CHECK(path.pieces[0].b.y == doctest::Approx(kSqrt3 / 2).epsilon(1e-12));
    CHECK(path.pieces[1].theta_from == doctest::Approx(2 * kPi / 3).epsilon(1e-12));
    CHECK(path.pieces[1].theta_to == doctest::Approx(kPi / 3).epsilon(1e-12));
    CHECK(path.pieces[1].length == doctest::Approx(kPi / 3).epsilon(1e-12));

    // Piece endpoints chain up exactly.
    for (size_t i = 0; i + 1 < path.pieces.size(); ++i)
        CHECK(distance(path.pieces[i].b, path.pieces[i + 1].a) < 1e-12);

    double piece_sum = 0;
    for (const auto& piece : path.pieces) piece_sum += piece.length;
    CHECK(piece_sum == doctest::Approx(path.total_length).epsilon(1e-12));
}

TEST_CASE("geodesic degenerate and clear cases") {
    auto obs = unit_disk();
    auto self = geodesic(obs, {-2, 0}, {-2, 0});
    CHECK(self.total_length == 0.0);
    CHECK(path_point(obs, self, 0.0) == Vec2{-2, 0});

    auto clear = geodesic(obs, {0, 2}, {3, 2});
    CHECK(clear.pieces.size() == 1);
    CHECK(clear.total_length == doctest::Approx(3.0));
    CHECK(geodesic_length(obs, {0, 2}, {3, 2}) == 3.0);
}

TEST_CASE("geodesic around a square polygon") {
    auto obs = unit_square();
    auto path = geodesic(obs, {-2, 0}, {2, 0});
    // Tie resolved upward: (-2,0) -> (-1,1) -> walk top edge -> (1,1) -> (2,0).
    CHECK(path.total_length == doctest::Approx(2.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-12));
    REQUIRE(path.pieces.size() == 3);
    CHECK(path.pieces[0].b == Vec2{-1, 1});
    CHECK(path.pieces[1].kind == GeodesicPath::PieceKind::Arc);
    CHECK(path.pieces[1].length == doctest::Approx(2.0));
    CHECK(path.pieces[2].a == Vec2{1, 1});

    // Off-symmetric pair against the discretized oracle.
    oracles::VisibilityOracle oracle(obs, 4000);
    Rng rng(5);
    for (int it = 0; it < 25; ++it) {
        Vec2 x = oracles::random_admissible_point(rng, obs, 1.7, 4.0);
        Vec2 y = oracles::random_admissible_point(rng, obs, 1.7, 4.0);
        double got = geodesic_length(obs, x, y);
        double want = oracle.length(x, y);
        CHECK(got == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("geodesic_length agrees with the visibility-graph oracle") {
    auto obs = unit_disk();
    oracles::VisibilityOracle oracle(obs, 4000);
    Rng rng(99);
    for (int it = 0; it < 40; ++it) {
        Vec2 x = oracles::random_admissible_point(rng, obs, 1.05, 4.0);
        Vec2 y = oracles::random_admissible_point(rng, obs, 1.05, 4.0);
        double got = geodesic_length(obs, x, y);
        double want = oracle.length(x, y);
        CHECK(got == doctest::Approx(want).epsilon(1e-4));
    }
}

TEST_CASE("metric properties of geodesic_length") {
    auto obs = unit_disk();
    Rng rng(7);
    std::vector<Vec2> pts;
    for (int i = 0; i < 60; ++i)
        pts.push_back(oracles::random_admissible_point(rng, obs, 1.0 + 1e-6, 4.0));

    // Symmetry is exact by construction; lower bound vs Euclidean distance.
    int pairs = 0;
    for (size_t i = 0; i < pts.size() && pairs < 1000; ++i) {
        for (size_t j = 0; j < pts.size() && pairs < 1000; ++j, ++pairs) {
            double dij = geodesic_length(obs, pts[i], pts[j]);
            CHECK(dij == geodesic_length(obs, pts[j], pts[i]));
            double eu = distance(pts[i], pts[j]);
            CHECK(dij >= eu - 1e-12);
            if (segment_clear(obs, pts[i], pts[j]))
                CHECK(dij == doctest::Approx(eu).epsilon(1e-15));
            else
                CHECK(dij > eu + 1e-12);
        }
    }

    // Triangle inequality and 1-Lipschitz continuity in each argument.
    int triples = 0;
    for (size_t i = 0; i < pts.size() && triples < 1000; i += 1)
        for (size_t j = i; j < pts.size() && triples < 1000; j += 2)
            for (size_t k = j; k < pts.size() && triples < 1000; k += 3, ++triples) {
                double dik = geodesic_length(obs, pts[i], pts[k]);
                double dij = geodesic_length(obs, pts[i], pts[j]);
                double djk = geodesic_length(obs, pts[j], pts[k]);
                CHECK(dik <= dij + djk + 1e-9);
                CHECK(std::abs(dij - djk) <= dik + 1e-9);
            }
}

TEST_CASE("path_point walks the path consistently") {
    auto obs = unit_disk();

    auto straight = geodesic(obs, {0, 2}, {2, 2});
    CHECK(distance(path_point(obs, straight, 1.0), {1, 2}) < 1e-12);
    CHECK(path_point(obs, straight, 0.0) == Vec2{0, 2});

    auto wrap = geodesic(obs, {-2, 0}, {2, 0});
    Vec2 at = path_point(obs, wrap, kSqrt3);
    CHECK(distance(at, {-0.5, kSqrt3 / 2}) < 1e-12);
    CHECK_THROWS_AS(path_point(obs, wrap, wrap.total_length + 1.0), Error);

    // d(path(s1), path(s2)) == s2 - s1: sub-paths of a geodesic are geodesics.
    Rng rng(31);
    for (int it = 0; it < 200; ++it) {
        double s1 = rng.uniform(0.0, wrap.total_length);
        double s2 = rng.uniform(0.0, wrap.total_length);
        if (s1 > s2) std::swap(s1, s2);
        double d = geodesic_length(obs, path_point(obs, wrap, s1), path_point(obs, wrap, s2));
        CHECK(d == doctest::Approx(s2 - s1).epsilon(1e-9));
    }
}

TEST_CASE("betweenness on and off the geodesic") {
    auto obs = unit_disk();
    Vec2 w{-2, 0}, x{-0.5, kSqrt3 / 2}, y{0.5, kSqrt3 / 2}, z{2, 0};
    CHECK(betweenness(obs, w, x, y, z, 1e-9));
    CHECK(betweenness(obs, w, w, w, w, 1e-9));
    CHECK_FALSE(betweenness(obs, w, {0, 2}, y, z, 1e-9));
}

TEST_CASE("boundary_param reference and values") {
    auto obs = unit_disk();
    CHECK(obs.boundary_param({1, 0}, 1e-9) == doctest::Approx(0.0));
    CHECK(obs.boundary_param({0, 1}, 1e-9) == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(obs.boundary_param({-0.5, kSqrt3 / 2}, 1e-9) ==
          doctest::Approx(2 * kPi / 3).epsilon(1e-12));
    CHECK_THROWS_AS(obs.boundary_param({2, 2}, 1e-9), Error);

    // Round trip boundary_point(boundary_param) on both shapes.
    auto square = unit_square();
    Rng rng(3);
    for (int it = 0; it < 100; ++it) {
        for (const auto* obs_ptr : {&obs, &square}) {
            double theta = rng.uniform(0.0, obs_ptr->boundary_length());
            Vec2 q = obs_ptr->boundary_point(theta);
            double back = obs_ptr->boundary_param(q, 1e-9);
            double diff = std::abs(back - theta);
            diff = std::min(diff, obs_ptr->boundary_length() - diff);
            CHECK(diff < 1e-9);
        }
    }
}

TEST_CASE("obstacle validation") {
    CHECK_THROWS_AS(ConvexObstacle::make_disk({0, 0}, 0.0), InputError);
    CHECK_THROWS_AS(ConvexObstacle::make_disk({0, 0}, -1.0), InputError);
    // Clockwise square is rejected.
    CHECK_THROWS_AS(ConvexObstacle::make_polygon({{-1, -1}, {-1, 1}, {1, 1}, {1, -1}}),
                    InputError);
    // Collinear midpoint breaks strict convexity.
    CHECK_THROWS_AS(ConvexObstacle::make_polygon({{0, 0}, {1, 0}, {2, 0}, {1, 1}}),
                    InputError);
    CHECK_THROWS_AS(ConvexObstacle::make_polygon({{0, 0}, {1, 0}}), InputError);
}
