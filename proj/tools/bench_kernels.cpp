// Benchmark of the OpenMP pair-scan kernels against their serial reference:
// cost-matrix assembly and transport-ray relation construction.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "obt/kantorovich.hpp"
#include "obt/ray_structure.hpp"
#include "obt/rng.hpp"

using namespace obt;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

DiscreteMeasure random_side(Rng& rng, int n, double x_lo, double x_hi) {
    DiscreteMeasure m;
    m.weights.assign(n, 1.0 / n);
    for (int i = 0; i < n; ++i)
        m.atoms.push_back({rng.uniform(x_lo, x_hi), rng.uniform(-1.4, 1.4)});
    return m;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_seconds();
        fn();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without openmp; parallel kernels run serially\n");
#endif
    auto obs = ConvexObstacle::make_disk({0, 0}, 1.0);

    std::printf("%-28s %8s %12s %12s %9s\n", "kernel", "n", "serial[s]", "parallel[s]",
                "speedup");
    for (int n : {100, 200, 400, 800}) {
        Rng rng(1000 + n);
        auto mu = random_side(rng, n, -3.5, -1.5);
        auto nu = random_side(rng, n, 1.5, 3.5);

        double ts = time_best_of(3, [&] { cost_matrix_serial(mu, nu, obs); });
        double tp = time_best_of(3, [&] { cost_matrix(mu, nu, obs); });
        std::printf("%-28s %8d %12.4f %12.4f %8.2fx\n", "cost_matrix", n, ts, tp, ts / tp);
    }

    for (int n : {50, 100, 200}) {
        Rng rng(2000 + n);
        auto mu = random_side(rng, n, -3.5, -1.5);
        auto nu = random_side(rng, n, 1.5, 3.5);
        auto c = cost_matrix(mu, nu, obs);
        auto solved = solve_exact(mu, nu, c);
        auto nodes = build_nodes(mu, nu, solved.plan, solved.potential, obs, 8);
        double tol = geometry_eps(nodes.scale);

        double ts = time_best_of(3, [&] { build_G_serial(nodes, obs, tol); });
        double tp = time_best_of(3, [&] { build_G(nodes, obs, tol); });
        std::printf("%-28s %8zu %12.4f %12.4f %8.2fx\n", "build_G (nodes)", nodes.size(),
                    ts, tp, ts / tp);
    }
    return 0;
}
