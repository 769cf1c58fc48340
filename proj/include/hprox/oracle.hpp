#pragma once

// Brute-force ground truth. Everything here is quadratic or worse on purpose;
// the indexes and graph algorithms are checked against these routines.

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hprox/geometry.hpp"

namespace hprox {

class EmptySceneError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Neighbor {
    Id id = 0;
    double distance = 0.0;
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// The proximity graph G_{r0}: edge (i, j) iff homothet_distance <= r0.
/// Materializes sorted adjacency lists with an exhaustive pairwise scan.
class AdjacencyOracle {
public:
    AdjacencyOracle(const Scene& scene, double r0);

    std::size_t size() const { return n_; }
    double threshold() const { return r0_; }
    bool edge(Id i, Id j) const;
    const std::vector<Id>& neighbors(Id i) const { return adj_[i]; }
    std::size_t edge_count() const;

private:
    std::size_t n_;
    double r0_;
    std::vector<std::uint8_t> bits_;  // dense matrix, kept only for small n
    std::vector<std::vector<Id>> adj_;
};

std::vector<Id> brute_intersections(const Scene& scene, const Homothet& query);
/// Ties broken by smallest id.
Neighbor brute_nn(const Scene& scene, const Homothet& query);

struct LevelCount {
    std::size_t below = 0;  // f_i(c) < rho
    std::size_t on = 0;     // f_i(c) == rho
};
LevelCount level_of_point(const Scene& scene, const Vec3& c, double rho);

/// Member with the k-th smallest f_i(x), 1-based, ties by id.
Id kth_nearest(const Scene& scene, const Vec3& x, std::size_t k);

/// Expansion radius at which two members become tangent, clamped at 0.
double critical_value(const ConvexBody& body, const Homothet& a, const Homothet& b);
/// Sorted, deduplicated pairwise critical values. Values closer than 1e-12
/// collapse onto the largest of their cluster, so a decision taken at a
/// representative sees every edge of the cluster.
std::vector<double> critical_values(const Scene& scene);
std::size_t count_critical_leq(const Scene& scene, double r0);

// Textbook graph algorithms on the materialized adjacency.

struct BfsLayers {
    std::vector<std::vector<Id>> layers;
    std::vector<long> layer_of;  // -1 when unreached
    std::vector<long> parent;    // -1 for the source and unreached
};
/// Frontier scanned in ascending id order, next layer sorted ascending.
BfsLayers textbook_bfs(const AdjacencyOracle& g, Id source,
                       std::size_t max_depth = std::numeric_limits<std::size_t>::max());

std::vector<double> textbook_dijkstra(const Scene& scene, double r0, Id source);

struct SpanningForest {
    std::vector<std::pair<Id, Id>> edges;
    double weight = 0.0;
    std::size_t components = 0;
};
SpanningForest kruskal(const Scene& scene, double r0);

/// <= k-hop path from source to target in G_{2r}, i.e. critical_value <= r.
bool hop_bounded_reachable(const Scene& scene, Id source, Id target, std::size_t k, double r);

/// Walks critical_values() in ascending order and returns the first value at
/// which a <= k-hop path exists, or nullopt. Edges are added incrementally
/// and hop distances repaired by relaxation, so every value is decided.
std::optional<double> rsp_ascending_scan(const Scene& scene, Id source, Id target, std::size_t k);

}  // namespace hprox
