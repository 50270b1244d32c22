#include "obt/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace obt {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InputError("problem: unknown field \"" + it.key() + "\" in " + where);
}

double number_at(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw InputError("problem: missing field \"" + key + "\" in " + where);
    if (!j.at(key).is_number())
        throw InputError("problem: field \"" + key + "\" in " + where + " must be a number");
    return j.at(key).get<double>();
}

Vec2 point_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError("problem: " + where + " must be a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

ConvexObstacle parse_obstacle(const json& j) {
    if (!j.is_object()) throw InputError("problem: \"obstacle\" must be an object");
    std::string type = j.value("type", std::string{});
    if (type == "disk") {
        reject_unknown(j, {"type", "center", "radius"}, "obstacle");
        if (!j.contains("center"))
            throw InputError("problem: missing field \"center\" in obstacle");
        Vec2 center = point_from(j.at("center"), "obstacle.center");
        double radius = number_at(j, "radius", "obstacle");
        return ConvexObstacle::make_disk(center, radius);
    }
    if (type == "polygon") {
        reject_unknown(j, {"type", "vertices"}, "obstacle");
        if (!j.contains("vertices") || !j.at("vertices").is_array())
            throw InputError("problem: polygon obstacle needs a \"vertices\" array");
        std::vector<Vec2> vertices;
        for (size_t k = 0; k < j.at("vertices").size(); ++k)
            vertices.push_back(point_from(j.at("vertices")[k],
                                          "obstacle.vertices[" + std::to_string(k) + "]"));
        return ConvexObstacle::make_polygon(std::move(vertices));
    }
    throw InputError("problem: obstacle type must be \"disk\" or \"polygon\"");
}

DensitySpec parse_density(const json& j, const ConvexObstacle& obs,
                          std::uint64_t default_seed, const std::string& where) {
    reject_unknown(j, {"region", "profile", "n", "seed"}, where);
    DensitySpec spec;

    if (!j.contains("region") || !j.at("region").is_object())
        throw InputError("problem: missing \"region\" object in " + where);
    const json& region = j.at("region");
    if (region.contains("rectangle")) {
        reject_unknown(region, {"rectangle"}, where + ".region");
        const json& r = region.at("rectangle");
        if (!r.is_array() || r.size() != 4)
            throw InputError("problem: " + where +
                             ".region.rectangle must be [xmin, ymin, xmax, ymax]");
        spec.region = DensityRegion::Rectangle;
        spec.xmin = r[0].get<double>();
        spec.ymin = r[1].get<double>();
        spec.xmax = r[2].get<double>();
        spec.ymax = r[3].get<double>();
    } else if (region.contains("annulus")) {
        reject_unknown(region, {"annulus"}, where + ".region");
        const json& a = region.at("annulus");
        reject_unknown(a, {"r_inner", "r_outer"}, where + ".region.annulus");
        spec.region = DensityRegion::Annulus;
        spec.r_inner = number_at(a, "r_inner", where + ".region.annulus");
        spec.r_outer = number_at(a, "r_outer", where + ".region.annulus");
    } else {
        throw InputError("problem: " + where +
                         ".region must contain \"rectangle\" or \"annulus\"");
    }

    std::string profile = j.value("profile", std::string("uniform"));
    if (profile == "uniform")
        spec.profile = DensityProfile::Uniform;
    else if (profile == "radial-linear")
        spec.profile = DensityProfile::RadialLinear;
    else
        throw InputError("problem: " + where +
                         ".profile must be \"uniform\" or \"radial-linear\"");

    spec.n = static_cast<int>(number_at(j, "n", where));
    if (spec.n < 1) throw InputError("problem: " + where + ".n must be >= 1");
    spec.seed = j.contains("seed")
                    ? static_cast<std::uint64_t>(number_at(j, "seed", where))
                    : default_seed;
    (void)obs;
    return spec;
}

MeasureSpec parse_measure(const json& j, const ConvexObstacle& obs,
                          std::uint64_t default_seed, const std::string& where) {
    if (!j.is_object()) throw InputError("problem: \"" + where + "\" must be an object");
    MeasureSpec spec;
    if (j.contains("density")) {
        reject_unknown(j, {"density"}, where);
        spec.is_density = true;
        spec.density = parse_density(j.at("density"), obs, default_seed, where + ".density");
        return spec;
    }
    reject_unknown(j, {"atoms", "weights"}, where);
    if (!j.contains("atoms") || !j.at("atoms").is_array() || j.at("atoms").empty())
        throw InputError("problem: " + where + " needs a nonempty \"atoms\" array");
    for (size_t k = 0; k < j.at("atoms").size(); ++k)
        spec.atoms.atoms.push_back(
            point_from(j.at("atoms")[k], where + ".atoms[" + std::to_string(k) + "]"));
    if (j.contains("weights")) {
        if (!j.at("weights").is_array() || j.at("weights").size() != spec.atoms.atoms.size())
            throw InputError("problem: " + where +
                             ".weights must match the atom count");
        for (const auto& w : j.at("weights")) spec.atoms.weights.push_back(w.get<double>());
    } else {
        spec.atoms.weights.assign(spec.atoms.atoms.size(),
                                  1.0 / spec.atoms.atoms.size());
    }
    spec.atoms.validate(obs);
    return spec;
}

Problem parse_problem_json(const json& j) {
    if (!j.is_object()) throw InputError("problem: top level must be an object");
    reject_unknown(j, {"obstacle", "mu", "nu", "options"}, "the problem");
    for (const char* key : {"obstacle", "mu", "nu"})
        if (!j.contains(key))
            throw InputError(std::string("problem: missing field \"") + key + "\"");

    Problem p{parse_obstacle(j.at("obstacle")), {}, {}, {}};

    if (j.contains("options")) {
        const json& o = j.at("options");
        reject_unknown(o, {"tol", "samples_per_geodesic", "seed"}, "options");
        if (o.contains("tol")) p.options.tol = number_at(o, "tol", "options");
        if (o.contains("samples_per_geodesic"))
            p.options.samples_per_geodesic =
                static_cast<int>(number_at(o, "samples_per_geodesic", "options"));
        if (o.contains("seed"))
            p.options.seed = static_cast<std::uint64_t>(number_at(o, "seed", "options"));
        if (p.options.tol <= 0.0)
            throw InputError("problem: options.tol must be positive");
        if (p.options.samples_per_geodesic < 0)
            throw InputError("problem: options.samples_per_geodesic must be >= 0");
    }

    p.mu = parse_measure(j.at("mu"), p.obstacle, p.options.seed, "mu");
    p.nu = parse_measure(j.at("nu"), p.obstacle, p.options.seed + 1, "nu");
    return p;
}

} // namespace

Problem parse_problem_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("problem: JSON parse error: ") + e.what());
    }
    return parse_problem_json(j);
}

Problem parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("problem: cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

} // namespace obt
