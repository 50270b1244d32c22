#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "obt/geometry.hpp"

namespace obt {

// Weighted atoms; weights strictly positive and summing to 1.
struct DiscreteMeasure {
    std::vector<Vec2> atoms;
    std::vector<double> weights;

    size_t size() const { return atoms.size(); }
    double total_mass() const;

    // Checks the type invariants (mass 1 within 1e-12, positive weights,
    // atoms outside the open obstacle); throws InputError naming the first
    // offending atom.
    void validate(const ConvexObstacle& obs) const;
};

enum class DensityRegion { Rectangle, Annulus };
enum class DensityProfile { Uniform, RadialLinear };

// Sampled-density description: n equal-weight atoms drawn from a profile on
// a region, rejecting obstacle-interior draws.
struct DensitySpec {
    DensityRegion region = DensityRegion::Rectangle;
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;  // rectangle
    double r_inner = 0, r_outer = 0;                // annulus around the obstacle
    DensityProfile profile = DensityProfile::Uniform;
    int n = 0;
    std::uint64_t seed = 0;
};

DiscreteMeasure sample_density(const DensitySpec& spec, const ConvexObstacle& obs);

// T_sharp(m): atoms moved by `map`, coincident images merged.
DiscreteMeasure pushforward(const DiscreteMeasure& m,
                            const std::function<Vec2(size_t)>& map);

// One-dimensional step CDF over sorted breakpoints with ties merged.
struct StepCDF {
    std::vector<double> breakpoints;
    std::vector<double> cumulative;  // nondecreasing, ends at 1
};

StepCDF build_cdf(const std::vector<double>& values, const std::vector<double>& weights);

// Left-continuous generalized inverse inf{ v : CDF(v) >= q }.
double quantile(const StepCDF& cdf, double q);

// Order-free comparison of weighted atom multisets after merging atoms that
// coincide within tol.
bool exact_equal(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double tol);

} // namespace obt
