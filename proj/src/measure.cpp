#include "obt/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "obt/rng.hpp"

namespace obt {

double DiscreteMeasure::total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void DiscreteMeasure::validate(const ConvexObstacle& obs) const {
    if (atoms.size() != weights.size())
        throw InputError("measure: atoms and weights differ in length");
    if (atoms.empty()) throw InputError("measure: no atoms");
    for (size_t i = 0; i < weights.size(); ++i)
        if (!(weights[i] > 0.0))
            throw InputError("measure: weight of atom " + std::to_string(i) +
                             " is not strictly positive");
    if (std::abs(total_mass() - 1.0) > 1e-12)
        throw InputError("measure: weights do not sum to 1");
    const double eps = geometry_eps(obs.extent());
    for (size_t i = 0; i < atoms.size(); ++i)
        if (obs.strictly_inside(atoms[i], eps))
            throw InputError("measure: atom " + std::to_string(i) +
                             " lies inside the obstacle");
}

DiscreteMeasure sample_density(const DensitySpec& spec, const ConvexObstacle& obs) {
    if (spec.n < 1) throw InputError("density spec: n must be >= 1");
    if (spec.region == DensityRegion::Rectangle) {
        if (!(spec.xmax > spec.xmin) || !(spec.ymax > spec.ymin))
            throw InputError("density spec: empty rectangle");
    } else {
        if (!(spec.r_outer > spec.r_inner) || spec.r_inner < 0.0)
            throw InputError("density spec: invalid annulus radii");
    }

    Rng rng(spec.seed);
    const double eps = geometry_eps(obs.extent());

    // An upper bound on the radial-linear weight over the region, for
    // rejection sampling.
    double wmax = 0.0;
    if (spec.profile == DensityProfile::RadialLinear) {
        if (spec.region == DensityRegion::Annulus) {
            wmax = spec.r_outer;
        } else {
            for (double cx : {spec.xmin, spec.xmax})
                for (double cy : {spec.ymin, spec.ymax})
                    wmax = std::max(wmax, distance({cx, cy}, obs.center()));
        }
    }

    auto draw_position = [&]() -> Vec2 {
        if (spec.region == DensityRegion::Rectangle)
            return {rng.uniform(spec.xmin, spec.xmax), rng.uniform(spec.ymin, spec.ymax)};
        // Area-uniform draw on the annulus around the obstacle center.
        double u = rng.uniform01();
        double r = std::sqrt(spec.r_inner * spec.r_inner +
                             u * (spec.r_outer * spec.r_outer - spec.r_inner * spec.r_inner));
        double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        return obs.center() + Vec2{r * std::cos(phi), r * std::sin(phi)};
    };

    DiscreteMeasure out;
    out.atoms.reserve(spec.n);
    const long max_attempts = 100000L * spec.n + 100000L;
    long attempts = 0;
    while (static_cast<int>(out.atoms.size()) < spec.n) {
        if (++attempts > max_attempts)
            throw InputError("density spec: region appears to lie inside the obstacle");
        Vec2 p = draw_position();
        if (spec.profile == DensityProfile::RadialLinear) {
            double w = distance(p, obs.center());
            if (rng.uniform01() * wmax > w) continue;
        }
        if (obs.strictly_inside(p, eps)) continue;
        out.atoms.push_back(p);
    }
    out.weights.assign(spec.n, 1.0 / spec.n);
    return out;
}

DiscreteMeasure pushforward(const DiscreteMeasure& m,
                            const std::function<Vec2(size_t)>& map) {
    DiscreteMeasure out;
    std::map<std::pair<double, double>, size_t> seen;
    for (size_t i = 0; i < m.atoms.size(); ++i) {
        Vec2 q = map(i);
        auto key = std::make_pair(q.x, q.y);
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(key, out.atoms.size());
            out.atoms.push_back(q);
            out.weights.push_back(m.weights[i]);
        } else {
            out.weights[it->second] += m.weights[i];
        }
    }
    return out;
}

StepCDF build_cdf(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size())
        throw Error("build_cdf: values and weights differ in length");
    for (double w : weights)
        if (w < 0.0) throw Error("build_cdf: negative weight");

    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });

    StepCDF cdf;
    double acc = 0.0;
    for (size_t k : order) {
        acc += weights[k];
        if (!cdf.breakpoints.empty() && cdf.breakpoints.back() == values[k])
            cdf.cumulative.back() = acc;
        else {
            cdf.breakpoints.push_back(values[k]);
            cdf.cumulative.push_back(acc);
        }
    }
    return cdf;
}

double quantile(const StepCDF& cdf, double q) {
    if (cdf.breakpoints.empty()) throw Error("quantile: empty CDF");
    auto it = std::lower_bound(cdf.cumulative.begin(), cdf.cumulative.end(), q);
    if (it == cdf.cumulative.end()) return cdf.breakpoints.back();
    return cdf.breakpoints[static_cast<size_t>(it - cdf.cumulative.begin())];
}

namespace {

// Greedy tol-merge of coincident atoms, order-stable.
DiscreteMeasure merge_atoms(const DiscreteMeasure& m, double tol) {
    DiscreteMeasure out;
    for (size_t i = 0; i < m.atoms.size(); ++i) {
        bool merged = false;
        for (size_t k = 0; k < out.atoms.size(); ++k) {
            if (distance(out.atoms[k], m.atoms[i]) <= tol) {
                out.weights[k] += m.weights[i];
                merged = true;
                break;
            }
        }
        if (!merged) {
            out.atoms.push_back(m.atoms[i]);
            out.weights.push_back(m.weights[i]);
        }
    }
    return out;
}

} // namespace

bool exact_equal(const DiscreteMeasure& m1, const DiscreteMeasure& m2, double tol) {
    DiscreteMeasure a = merge_atoms(m1, tol);
    DiscreteMeasure b = merge_atoms(m2, tol);
    if (a.size() != b.size()) return false;

    std::vector<size_t> oa(a.size()), ob(b.size());
    std::iota(oa.begin(), oa.end(), 0);
    std::iota(ob.begin(), ob.end(), 0);
    auto by_pos = [](const DiscreteMeasure& m) {
        return [&m](size_t i, size_t j) { return lex_less(m.atoms[i], m.atoms[j]); };
    };
    std::sort(oa.begin(), oa.end(), by_pos(a));
    std::sort(ob.begin(), ob.end(), by_pos(b));

    for (size_t k = 0; k < oa.size(); ++k) {
        if (distance(a.atoms[oa[k]], b.atoms[ob[k]]) > tol) return false;
        if (std::abs(a.weights[oa[k]] - b.weights[ob[k]]) > tol) return false;
    }
    return true;
}

} // namespace obt
