// Command-line frontend: solve a transport problem around a convex obstacle,
// re-verify a run directory, or query the obstacle metric.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "obt/pipeline.hpp"
#include "obt/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

obt::Vec2 parse_point(const std::string& text) {
    double x = 0, y = 0;
    char comma = 0;
    std::istringstream in(text);
    if (!(in >> x >> comma >> y) || comma != ',')
        throw obt::InputError("expected a point as \"x,y\", got \"" + text + "\"");
    return {x, y};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw obt::InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_solve(const std::string& problem_path, const std::string& out_dir, double tol,
              bool svg, const std::string& layers) {
    std::string problem_text = slurp(problem_path);
    obt::Problem problem = obt::parse_problem_text(problem_text);
    if (tol > 0) problem.options.tol = tol;

    auto artifacts = obt::run_solve(problem, problem_text, out_dir, svg, layers);
    std::printf("artifacts written to %s\n", artifacts.dir.c_str());
    std::printf("verification: %s\n", artifacts.verification_passed ? "pass" : "FAIL");
    return artifacts.verification_passed ? kExitOk : kExitVerification;
}

int cmd_geodesic(const std::string& problem_path, const std::string& from,
                 const std::string& to) {
    obt::Problem problem = obt::parse_problem(problem_path);
    obt::Vec2 x = parse_point(from);
    obt::Vec2 y = parse_point(to);
    auto path = obt::geodesic(problem.obstacle, x, y);
    std::printf("length %.12f\n", path.total_length);
    for (const auto& piece : path.pieces) {
        if (piece.kind == obt::GeodesicPath::PieceKind::Segment)
            std::printf("segment (%.9f, %.9f) -> (%.9f, %.9f)  length %.9f\n", piece.a.x,
                        piece.a.y, piece.b.x, piece.b.y, piece.length);
        else
            std::printf("arc theta %.9f -> %.9f (%s)  length %.9f\n", piece.theta_from,
                        piece.theta_to, piece.orientation > 0 ? "ccw" : "cw", piece.length);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monge transport around a convex planar obstacle"};
    app.require_subcommand(1);

    std::string problem_path, out_dir = "out", layers, run_dir, from, to;
    double tol = 0;
    bool svg = false;

    auto* solve = app.add_subcommand("solve", "solve a problem file and write artifacts");
    solve->add_option("problem", problem_path, "problem JSON file")->required();
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--tol", tol, "override options.tol");
    solve->add_flag("--svg", svg, "emit figure.svg");
    solve->add_option("--layers", layers,
                      "svg layers: obstacle,atoms,geodesics,g-edges,classes,map");

    auto* verify = app.add_subcommand("verify", "re-verify a run directory");
    verify->add_option("dir", run_dir, "run directory")->required();

    auto* geo = app.add_subcommand("geodesic", "query the obstacle metric");
    geo->add_option("problem", problem_path, "problem JSON file")->required();
    geo->add_option("--from", from, "start point as x,y")->required();
    geo->add_option("--to", to, "end point as x,y")->required();

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(problem_path, out_dir, tol, svg, layers);
        if (verify->parsed()) return obt::verify_run(run_dir) == 0 ? kExitOk : kExitVerification;
        return cmd_geodesic(problem_path, from, to);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    } catch (const obt::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
}
