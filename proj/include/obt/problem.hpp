#pragma once

#include <cstdint>
#include <string>

#include "obt/geometry.hpp"
#include "obt/measure.hpp"

namespace obt {

struct ProblemOptions {
    double tol = 1e-9;
    int samples_per_geodesic = 8;
    std::uint64_t seed = 0;
};

// One marginal: either explicit atoms or a density to sample.
struct MeasureSpec {
    bool is_density = false;
    DiscreteMeasure atoms;
    DensitySpec density;

    DiscreteMeasure realize(const ConvexObstacle& obs) const {
        if (!is_density) return atoms;
        return sample_density(density, obs);
    }
};

struct Problem {
    ConvexObstacle obstacle;
    MeasureSpec mu, nu;
    ProblemOptions options;
};

// Parses and fully validates a problem file; unknown fields are rejected
// and validation errors name the offending field or atom.
Problem parse_problem(const std::string& path);
Problem parse_problem_text(const std::string& json_text);

} // namespace obt
