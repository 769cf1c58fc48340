#pragma once

// Invariant suites. Each check compares an implementation against the
// brute-force oracle or restates a structural property, and records enough
// parameters to reproduce a failure in isolation.

#include <cstdint>
#include <string>
#include <vector>

#include "hprox/cutting.hpp"
#include "hprox/geometry.hpp"
#include "hprox/index.hpp"
#include "json.hpp"

namespace hprox {

struct CheckResult {
    std::string module;
    std::string invariant;
    bool ok = true;
    std::string detail;  // measured values
    std::string repro;   // parameters reproducing this check
    double seconds = 0.0;
    nlohmann::json metrics = nlohmann::json::object();
};
using Checks = std::vector<CheckResult>;

nlohmann::json to_json(const CheckResult& c);

/// Random body of the given kind: 0 euclidean, 1 ellipsoid, 2 lp superball.
ConvexBody random_body(int kind, CounterRng& rng);

// Global property suites; trial counts are parameters so the same code runs
// at acceptance scale and as a quick smoke test.

/// Norm axioms, triangle inequality, single crossing, containment criterion,
/// center domination, star-shapedness of the rank along rays and the radial
/// level bound.
Checks check_kernel_lemmas(std::size_t trials, std::uint64_t seed);

struct DynamicOptions {
    std::size_t sequences = 1000;
    std::size_t length = 200;
    std::size_t max_n = 300;
    std::vector<StructureKind> structures{StructureKind::fast, StructureKind::grouped,
                                          StructureKind::linear};
    std::uint64_t seed = 1;
};
/// Mixed insert/delete/detect/report/nearest sequences against a scratch oracle.
CheckResult check_dynamic_equivalence(const DynamicOptions& options);

/// Cutting contract on a uniform congruent instance.
CheckResult check_cutting_contract(std::size_t n, double t, std::uint64_t seed,
                                   CuttingReport* report = nullptr);

/// Fitted shallow-net alpha for a sample of the size given by the net lemma.
CheckResult check_shallow_net(std::size_t n, double epsilon, std::size_t ranges, std::uint64_t seed,
                              NetReport* report = nullptr);

/// BFS, DFS, MST, Dijkstra and hop-bounded RSP decisions against the textbook
/// algorithms on the materialized adjacency.
CheckResult check_graph_exactness(std::size_t instances, std::size_t max_n, std::uint64_t seed);

/// rsp_solve against the ascending scan over critical values.
CheckResult check_rsp_exactness(std::size_t instances, std::size_t max_n, std::uint64_t seed);

/// Rebuild counters and post-rebuild audits of the fast tree under
/// deletion-heavy workloads.
CheckResult check_rebuild_accounting(std::size_t workloads, std::uint64_t seed);

/// Every suite specialized to one scene (used by `verify`).
Checks verify_scene(const Scene& scene, std::uint64_t seed, StructureKind structure);

}  // namespace hprox
