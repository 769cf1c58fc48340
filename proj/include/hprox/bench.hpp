#pragma once

// Timing harnesses: BFS scaling against the materialized-adjacency baseline
// and query throughput per structure.

#include <cstdint>
#include <vector>

#include "hprox/index.hpp"
#include "hprox/scene_io.hpp"
#include "json.hpp"

namespace hprox {

struct ScalingOptions {
    std::vector<std::size_t> sizes{2000, 4000, 8000, 16000, 32000};
    StructureKind structure = StructureKind::linear;
    double degree = 8.0;
    std::uint64_t seed = 1;
    /// Time the O(n^2) adjacency build + textbook BFS for n up to this size.
    std::size_t baseline_max_n = 32000;
    /// Repeat each measurement until this much time was spent; report the minimum.
    double min_total_ms = 150.0;
};

struct ScalingReport {
    std::vector<TimingRow> rows;
    double slope = 0.0;          // least-squares log-log slope of index BFS time
    double ratio_at_max = -1.0;  // index / baseline at the largest size, -1 if not measured
    nlohmann::json to_json() const;
};

/// Index-backed BFS on congruent Euclidean balls of the given expected degree.
ScalingReport run_bfs_scaling(const ScalingOptions& options);

/// Build time, `queries` detect and report queries and index memory for one structure.
std::vector<TimingRow> run_query_bench(const Scene& scene, StructureKind kind, std::size_t queries,
                                       std::uint64_t seed, const IndexOptions& options = {});

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hprox
