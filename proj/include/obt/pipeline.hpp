#pragma once

#include <map>
#include <string>

#include "obt/monge.hpp"
#include "obt/problem.hpp"

namespace obt {

inline constexpr const char* kToolVersion = "0.1.0";

// Solver-level certificates checked on every run.
struct SolverCertificate {
    double duality_gap = 0.0;
    bool duality_ok = false;
    bool marginals_ok = false;
    long support_monotonicity_violations = 0;

    bool ok() const {
        return duality_ok && marginals_ok && support_monotonicity_violations == 0;
    }
};

// Everything one solve produces, in memory.
struct PipelineResult {
    DiscreteMeasure mu, nu;
    CostMatrix cost;
    TransportPlan plan;
    Potential potential;
    SolverCertificate certificate;
    NodeSet nodes;
    RayRelation g;
    TransportSets sets;
    ChainPartition part;
    std::vector<ClassDecomposition> classes;
    std::vector<std::vector<AssignedPair>> assignments;
    MongeMap map;
    VerificationReport report;

    bool pass() const { return certificate.ok() && report.pass(); }
};

// sample -> cost matrix -> exact solve -> rays -> chains -> class maps ->
// glue -> verify. Throws with a stage label on any error; the verification
// outcome is carried in result.report.
PipelineResult run_pipeline(const Problem& problem);

struct RunArtifacts {
    std::string dir;
    std::map<std::string, std::string> file_hashes;  // file name -> fnv1a hash
    bool verification_passed = false;
    std::string report_path;
};

// Runs the pipeline and writes all artifacts (measures, plan, potentials,
// ray and class dumps, map, report, optional SVG) into out_dir.
// svg_layers: comma-separated subset of
// obstacle,atoms,geodesics,g-edges,classes,map (empty = all).
RunArtifacts run_solve(const Problem& problem, const std::string& problem_file_copy,
                       const std::string& out_dir, bool with_svg,
                       const std::string& svg_layers);

// Serialized verification report with stable key order.
std::string emit_report(const PipelineResult& result, const Problem& problem,
                        const std::map<std::string, std::string>& file_hashes);

// Re-checks a run directory against its report: hashes, marginals, duality,
// the map cost identity, pushforward, potential identities, monotonicity.
// Returns 0 (ok) or 1 (verification failure); throws InputError on missing
// or malformed artifacts.
int verify_run(const std::string& dir);

// FNV-1a 64-bit content hash, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

} // namespace obt
