#include "obt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "obt/svg.hpp"

namespace obt {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kCostRelTol = 1e-7;
constexpr double kPotentialTol = 1e-7;
constexpr double kDualityTol = 1e-9;
constexpr double kMarginalTol = 1e-10;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw Error(std::string("stage ") + name + ": " + e.what());
    }
}

} // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

PipelineResult run_pipeline(const Problem& problem) {
    PipelineResult r;
    const auto& obs = problem.obstacle;
    double g_tol = 0.0;  // set by the rays stage

    stage("sample", [&] {
        r.mu = problem.mu.realize(obs);
        r.nu = problem.nu.realize(obs);
        r.mu.validate(obs);
        r.nu.validate(obs);
        return 0;
    });

    stage("cost-matrix", [&] {
        r.cost = cost_matrix(r.mu, r.nu, obs);
        return 0;
    });

    stage("solve", [&] {
        auto solved = solve_exact(r.mu, r.nu, r.cost);
        r.plan = std::move(solved.plan);
        r.potential = std::move(solved.potential);
        return 0;
    });

    stage("certificate", [&] {
        r.certificate.duality_gap = duality_gap(r.plan, r.potential, r.mu, r.nu, r.cost);
        r.certificate.duality_ok = std::abs(r.certificate.duality_gap) <= kDualityTol;
        auto rows = r.plan.row_masses(r.mu.size());
        auto cols = r.plan.col_masses(r.nu.size());
        r.certificate.marginals_ok = true;
        for (size_t i = 0; i < rows.size(); ++i)
            if (std::abs(rows[i] - r.mu.weights[i]) > kMarginalTol)
                r.certificate.marginals_ok = false;
        for (size_t j = 0; j < cols.size(); ++j)
            if (std::abs(cols[j] - r.nu.weights[j]) > kMarginalTol)
                r.certificate.marginals_ok = false;
        std::vector<std::pair<Vec2, Vec2>> support;
        for (const auto& c : r.plan.couplings)
            support.push_back({r.mu.atoms[c.i], r.nu.atoms[c.j]});
        r.certificate.support_monotonicity_violations = static_cast<long>(
            check_cyclical_monotonicity(support, obs, 4, 1000, kPotentialTol).size());
        return 0;
    });

    stage("rays", [&] {
        r.nodes = build_nodes(r.mu, r.nu, r.plan, r.potential, obs,
                              problem.options.samples_per_geodesic);
        g_tol = problem.options.tol * (1.0 + r.nodes.scale);
        r.g = build_G(r.nodes, obs, g_tol);
        return 0;
    });

    stage("transport-sets", [&] {
        r.sets = transport_sets(r.g);
        return 0;
    });

    stage("chains", [&] {
        r.part = chains(r.g, r.sets);
        return 0;
    });

    stage("classes", [&] {
        r.classes = decompose_classes(r.plan, r.nodes, r.part, obs);
        return 0;
    });

    stage("class-maps", [&] {
        for (const auto& cls : r.classes)
            r.assignments.push_back(cls.arc.kind == ClassKind::Boundary
                                        ? monotone_map_on_class(cls)
                                        : straight_class_map(cls));
        return 0;
    });

    stage("glue", [&] {
        r.map = glue_maps(r.assignments, r.mu, r.nu, r.plan, r.nodes);
        return 0;
    });

    stage("verify", [&] {
        // Identity checks are length-dimensional: on large scenes they must
        // track the relation tolerance (edges compose, so residuals reach a
        // few multiples of g_tol). Unit-scale scenes keep the 1e-7 floor.
        double check_tol = std::max(kPotentialTol, 10.0 * g_tol);
        auto structure =
            check_structure(r.nodes, r.g, r.sets, r.part, r.plan, obs, check_tol);
        r.report = verify_map(r.map, r.assignments, r.classes, r.mu, r.nu, r.plan,
                              r.potential, r.cost, structure, obs, kCostRelTol,
                              check_tol);
        return 0;
    });

    return r;
}

std::string emit_report(const PipelineResult& r, const Problem& problem,
                        const std::map<std::string, std::string>& file_hashes) {
    const bool polygon = problem.obstacle.shape() == ObstacleShape::Polygon;
    ordered_json j;
    j["tool"] = {{"name", "obt"}, {"version", kToolVersion}};
    j["problem"] = ordered_json{{"obstacle_kind", polygon ? "polygon" : "disk"},
                                {"polygon_extension", polygon},
                                {"n_mu", r.mu.size()},
                                {"n_nu", r.nu.size()},
                                {"seed", problem.options.seed},
                                {"samples_per_geodesic", problem.options.samples_per_geodesic},
                                {"tol", problem.options.tol}};
    j["tolerances"] = ordered_json{{"g_tol", problem.options.tol * (1.0 + r.nodes.scale)},
                                   {"cost_rel", r.report.tol_cost_rel},
                                   {"potential", r.report.tol_potential},
                                   {"hourglass", r.report.tol_hourglass},
                                   {"duality", kDualityTol},
                                   {"marginal", kMarginalTol}};
    j["costs"] = ordered_json{{"plan", r.report.cost_plan},
                              {"map", r.report.cost_map},
                              {"gap", r.report.cost_gap}};
    j["checks"] = ordered_json{
        {"cost_ok", r.report.cost_ok},
        {"pushforward_ok", r.report.pushforward_ok},
        {"graph_in_G_violations", r.report.graph_in_g_violations},
        {"monotonicity_violations", r.report.monotonicity_violations},
        {"hourglass_violations", r.report.hourglass_violations},
        {"duality_gap", r.certificate.duality_gap},
        {"duality_ok", r.certificate.duality_ok},
        {"marginals_ok", r.certificate.marginals_ok},
        {"support_monotonicity_violations", r.certificate.support_monotonicity_violations},
        {"structure",
         ordered_json{{"antisymmetric_ok", r.report.structure.antisymmetric_ok},
                      {"transitive_ok", r.report.structure.transitive_ok},
                      {"te_partition_ok", r.report.structure.te_partition_ok},
                      {"support_in_G_ok", r.report.structure.support_in_G_ok},
                      {"bfs_matches", r.report.structure.bfs_matches}}}};
    j["structure"] = ordered_json{{"nodes", r.nodes.size()},
                                  {"g_edges", r.g.edge_count()},
                                  {"T", r.sets.count_T},
                                  {"T_e", r.sets.count_Te},
                                  {"a", r.sets.count_a},
                                  {"b", r.sets.count_b},
                                  {"classes", r.classes.size()},
                                  {"fixed_points", r.report.fixed_points}};
    j["classes"] = ordered_json::array();
    for (const auto& s : r.report.class_summaries) {
        ordered_json c{{"label", s.label},
                       {"kind", s.kind == ClassKind::Boundary ? "boundary" : "straight"},
                       {"couplings", s.couplings},
                       {"rerouted", s.rerouted},
                       {"cost_share", s.cost_share}};
        if (s.kind == ClassKind::Boundary) {
            c["theta_z"] = s.theta_z;
            c["theta_w"] = s.theta_w;
            c["orientation"] = s.orientation;
            c["span"] = s.span;
        }
        j["classes"].push_back(c);
    }
    j["files"] = ordered_json::object();
    for (const auto& [name, hash] : file_hashes) j["files"][name] = hash;
    j["pass"] = r.pass();

    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    j["generated_at"] = stamp;  // excluded from hashing and determinism checks

    return j.dump(2) + "\n";
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string measure_csv(const DiscreteMeasure& m) {
    std::string out = "index,x,y,weight\n";
    for (size_t i = 0; i < m.size(); ++i)
        out += std::to_string(i) + "," + format_double(m.atoms[i].x) + "," +
               format_double(m.atoms[i].y) + "," + format_double(m.weights[i]) + "\n";
    return out;
}

std::string plan_csv(const TransportPlan& plan) {
    std::string out = "i,j,mass\n";
    for (const auto& c : plan.couplings)
        out += std::to_string(c.i) + "," + std::to_string(c.j) + "," +
               format_double(c.mass) + "\n";
    return out;
}

std::string potential_csv(const std::vector<double>& values) {
    std::string out = "index,value\n";
    for (size_t i = 0; i < values.size(); ++i)
        out += std::to_string(i) + "," + format_double(values[i]) + "\n";
    return out;
}

std::string rays_csv(const RayRelation& g) {
    std::string out = "from,to,relation\n";
    for (int u = 0; u < g.n; ++u)
        for (size_t k = 0; k < g.succ[u].size(); ++k) {
            if (!g.succ_strict[u][k]) continue;
            int v = g.succ[u][k];
            out += std::to_string(u) + "," + std::to_string(v) + ",G\n";
            out += std::to_string(v) + "," + std::to_string(u) + ",R\n";
        }
    return out;
}

std::string classes_csv(const ChainPartition& part) {
    std::string out = "node,class\n";
    for (size_t v = 0; v < part.attached.size(); ++v)
        out += std::to_string(v) + "," + std::to_string(part.attached[v]) + "\n";
    return out;
}

std::string map_csv(const MongeMap& map) {
    std::string out = "mu_index,nu_index\n";
    for (size_t i = 0; i < map.assignment.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(map.assignment[i]) + "\n";
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, size_t columns) {
    std::string text = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != columns)
            throw InputError("malformed row in " + path.string());
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace

RunArtifacts run_solve(const Problem& problem, const std::string& problem_file_copy,
                       const std::string& out_dir, bool with_svg,
                       const std::string& svg_layers) {
    PipelineResult result = run_pipeline(problem);

    fs::create_directories(out_dir);
    RunArtifacts artifacts;
    artifacts.dir = out_dir;

    auto put = [&](const std::string& name, const std::string& content) {
        write_file(fs::path(out_dir) / name, content);
        artifacts.file_hashes[name] = fnv1a_hex(content);
    };

    put("problem.json", problem_file_copy);
    put("mu.csv", measure_csv(result.mu));
    put("nu.csv", measure_csv(result.nu));
    put("plan.csv", plan_csv(result.plan));
    put("potentials_phi.csv", potential_csv(result.potential.phi));
    put("potentials_psi.csv", potential_csv(result.potential.psi));
    put("rays.csv", rays_csv(result.g));
    put("classes.csv", classes_csv(result.part));
    put("map.csv", map_csv(result.map));
    if (with_svg) put("figure.svg", render_svg(problem, result, svg_layers));

    std::string report = emit_report(result, problem, artifacts.file_hashes);
    write_file(fs::path(out_dir) / "report.json", report);
    artifacts.report_path = (fs::path(out_dir) / "report.json").string();
    artifacts.verification_passed = result.pass();
    return artifacts;
}

int verify_run(const std::string& dir) {
    const fs::path base(dir);
    json report;
    try {
        report = json::parse(read_file(base / "report.json"));
    } catch (const json::parse_error& e) {
        throw InputError(std::string("verify: report.json is not valid JSON: ") + e.what());
    }

    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
        if (!ok) ++failures;
    };

    // Content hashes of every referenced artifact.
    if (!report.contains("files") || !report["files"].is_object())
        throw InputError("verify: report.json carries no file table");
    for (auto it = report["files"].begin(); it != report["files"].end(); ++it) {
        std::string got = fnv1a_hex(read_file(base / it.key()));
        check(got == it.value().get<std::string>(), "hash " + it.key());
    }
    if (failures > 0) {
        std::printf("artifacts do not match the report; skipping semantic checks\n");
        return 1;
    }

    Problem problem = parse_problem((base / "problem.json").string());

    DiscreteMeasure mu, nu;
    for (const auto& row : read_csv(base / "mu.csv", 4)) {
        mu.atoms.push_back({std::stod(row[1]), std::stod(row[2])});
        mu.weights.push_back(std::stod(row[3]));
    }
    for (const auto& row : read_csv(base / "nu.csv", 4)) {
        nu.atoms.push_back({std::stod(row[1]), std::stod(row[2])});
        nu.weights.push_back(std::stod(row[3]));
    }
    mu.validate(problem.obstacle);
    nu.validate(problem.obstacle);

    TransportPlan plan;
    for (const auto& row : read_csv(base / "plan.csv", 3))
        plan.couplings.push_back({std::stoi(row[0]), std::stoi(row[1]), std::stod(row[2])});
    Potential pot;
    for (const auto& row : read_csv(base / "potentials_phi.csv", 2))
        pot.phi.push_back(std::stod(row[1]));
    for (const auto& row : read_csv(base / "potentials_psi.csv", 2))
        pot.psi.push_back(std::stod(row[1]));
    std::vector<int> assignment;
    for (const auto& row : read_csv(base / "map.csv", 2))
        assignment.push_back(std::stoi(row[1]));
    if (assignment.size() != mu.size() || pot.phi.size() != mu.size() ||
        pot.psi.size() != nu.size())
        throw InputError("verify: artifact sizes are inconsistent");

    CostMatrix cost = cost_matrix(mu, nu, problem.obstacle);

    auto rows = plan.row_masses(mu.size());
    auto cols = plan.col_masses(nu.size());
    bool marginals = true;
    for (size_t i = 0; i < rows.size(); ++i)
        marginals &= std::abs(rows[i] - mu.weights[i]) <= kMarginalTol;
    for (size_t j = 0; j < cols.size(); ++j)
        marginals &= std::abs(cols[j] - nu.weights[j]) <= kMarginalTol;
    check(marginals, "plan marginals (1e-10)");

    bool duality = false;
    try {
        duality = std::abs(duality_gap(plan, pot, mu, nu, cost)) <= kDualityTol;
    } catch (const Error&) {
    }
    check(duality, "duality gap (1e-9)");

    double cost_plan = plan_cost(plan, cost);
    double cost_map = 0.0;
    for (size_t i = 0; i < mu.size(); ++i)
        cost_map += mu.weights[i] * cost.at(i, assignment[i]);
    check(std::abs(cost_map - cost_plan) <= kCostRelTol * (1.0 + cost_plan),
          "map cost equals plan cost (1e-7 relative)");

    auto image = pushforward(mu, [&](size_t i) { return nu.atoms[assignment[i]]; });
    check(exact_equal(image, nu, 1e-12), "pushforward equals nu");

    bool identities = true;
    for (size_t i = 0; i < mu.size(); ++i)
        identities &=
            std::abs(pot.phi[i] + pot.psi[assignment[i]] - cost.at(i, assignment[i])) <=
            kPotentialTol;
    check(identities, "potential identity on assigned pairs (1e-7)");

    std::vector<std::pair<Vec2, Vec2>> graph;
    for (size_t i = 0; i < mu.size(); ++i)
        graph.push_back({mu.atoms[i], nu.atoms[assignment[i]]});
    auto violations =
        check_cyclical_monotonicity(graph, problem.obstacle, 4, 1000, kPotentialTol);
    check(violations.empty(), "map graph cyclical monotonicity");

    return failures == 0 ? 0 : 1;
}

} // namespace obt
