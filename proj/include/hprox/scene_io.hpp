#pragma once

// JSON forms of scenes, bodies and graph results, plus the CSV row formats
// shared by the command-line harness and the benchmarks.

#include <iosfwd>
#include <string>
#include <vector>

#include "hprox/cutting.hpp"
#include "hprox/geometry.hpp"
#include "hprox/graph.hpp"
#include "json.hpp"

namespace hprox {

/// {"type": "euclidean"} | {"type": "ellipsoid", "Q": [[...],[...],[...]]}
/// (or "axes": [a, b, c]) | {"type": "lp", "p": 4, "scale": [a, b, c]}.
nlohmann::json body_to_json(const ConvexBody& body);
/// Throws SceneError on malformed input and BodyError on invalid parameters.
ConvexBody body_from_json(const nlohmann::json& j);

/// {"body": ..., "homothets": [{"c": [x, y, z], "rho": r}, ...]}
nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

Scene read_scene(const std::string& path);
void write_scene(const Scene& scene, const std::string& path);
/// Serialized text, stable for a given scene (used for byte-identity checks).
std::string dump_scene(const Scene& scene);

/// Infinite distances are written as null.
nlohmann::json graph_result_to_json(const GraphResult& g);
GraphResult graph_result_from_json(const nlohmann::json& j);

/// Parses a body name as used on the command line: euclidean, ellipsoid
/// (semi-axes 1, 2, 4 unless given as ellipsoid:a,b,c) or lp (p = 4 unless
/// given as lp:p or lp:p:a,b,c).
ConvexBody parse_body_spec(const std::string& spec);

// CSV formats. Column order is part of the interface.

inline constexpr const char* kCuttingCsvHeader =
    "n,t,prism_count,max_conflict,flagged_leaves,level_window_fraction,wall_time_ms";
std::string cutting_csv_row(const CuttingReport& r);

inline constexpr const char* kTimingCsvHeader = "n,structure,op,count,wall_ms,peak_mem_bytes";
struct TimingRow {
    std::size_t n = 0;
    std::string structure;
    std::string op;
    std::size_t count = 0;
    double wall_ms = 0.0;
    std::size_t peak_mem_bytes = 0;
};
std::string timing_csv_row(const TimingRow& r);

/// Writes header + rows to `path` ("-" for stdout).
void write_csv(const std::string& path, const std::string& header, const std::vector<std::string>& rows);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace hprox
