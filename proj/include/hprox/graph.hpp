#pragma once

// Implicit-graph algorithms driven by a proximity index: nothing here ever
// materializes the adjacency. BFS and DFS delete members from the index as
// they are discovered; Prim and Dijkstra run on a bichromatic closest pair
// structure with cached nearest neighbors; RSP searches the critical values.

#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hprox/geometry.hpp"
#include "hprox/index.hpp"

namespace hprox {

class NoPath : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output of every graph algorithm; only the fields relevant to the
/// algorithm are filled.
struct GraphResult {
    std::string algorithm;
    std::optional<Id> source;
    std::vector<long> parent;                  // -1 for roots and unreached
    std::vector<std::vector<Id>> layers;       // bfs
    std::vector<Id> order;                     // dfs discovery order
    std::vector<double> distances;             // dijkstra, +inf when unreachable
    std::vector<std::pair<Id, Id>> edges;      // mst forest edges
    double weight = 0.0;                       // mst total weight
    std::size_t components = 0;                // mst, dfs
    std::optional<double> r_star;              // rsp
    std::vector<Id> path;                      // rsp witness
};

struct GraphOptions {
    StructureKind structure = StructureKind::linear;
    IndexOptions index;
};

/// Layers of G_{r0} from `source` (r0 = 0 is the intersection graph). The
/// frontier is processed in ascending id order, so parents coincide with the
/// textbook BFS on the materialized adjacency.
GraphResult bfs(const Scene& scene, Id source, const GraphOptions& options = {}, double r0 = 0.0,
                std::size_t max_depth = std::numeric_limits<std::size_t>::max());

/// DFS forest of G_{r0}: the tree of `source` first, then restarts from the
/// smallest undiscovered id.
GraphResult dfs(const Scene& scene, Id source, const GraphOptions& options = {}, double r0 = 0.0);

/// Bichromatic closest pair between red (query) homothets and a blue index.
/// The value of a pair is homothet_distance(shape(p), q) + offset(p); each red
/// caches its nearest blue and is recomputed lazily when that blue leaves.
class BcpState {
public:
    struct Pair {
        Id red = 0;
        Id blue = 0;
        double value = 0.0;
    };

    /// All `blue` members start on the blue side; ids are their positions.
    BcpState(const ConvexBody& body, const std::vector<Homothet>& blue, const GraphOptions& options);

    /// Moves blue member q to the red side with the given query shape and offset.
    void move_to_red(Id q, const Homothet& shape, double offset);
    /// Drops a red member permanently.
    void retire(Id red);
    /// The minimum pair; absent when either side is empty.
    std::optional<Pair> extract_min();

    bool blue_live(Id q) const { return blue_->live(q); }
    std::size_t blue_count() const { return blue_->live_count(); }
    std::size_t red_count() const { return reds_.size(); }
    std::optional<Id> first_blue() const { return blue_->first_live(); }
    const std::vector<Id>& red_ids() const { return red_order_; }
    /// Number of nearest-neighbor recomputations performed.
    std::size_t recomputations() const { return recomputations_; }

private:
    struct Red {
        Homothet shape;
        double offset = 0.0;
        Id cached = 0;
        double value = 0.0;
        bool dirty = true;
        std::size_t version = 0;
    };
    struct Entry {
        double value;
        Id red;
        Id blue;
        std::size_t version;
        bool operator>(const Entry& o) const {
            if (value != o.value) return value > o.value;
            if (red != o.red) return red > o.red;
            return blue > o.blue;
        }
    };
    void refresh(Id p);

    std::unique_ptr<ProximityIndex> blue_;
    std::unordered_map<Id, Red> reds_;
    std::vector<Id> red_order_;
    std::unordered_map<Id, std::unordered_set<Id>> cached_by_;  // blue -> reds caching it
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    std::size_t recomputations_ = 0;
};

/// Minimum spanning forest of G_{r0}. Edges are ordered by homothet_distance;
/// the reported weight clamps it at 0 (overlapping members are at distance 0),
/// a monotone map that leaves the minimum forest unchanged.
GraphResult mst_prim(const Scene& scene, double r0, const GraphOptions& options = {});

/// Shortest paths from `source` over the member centers, edges of K-length
/// at most r0, weights the K-distance between centers.
GraphResult dijkstra(const Scene& scene, double r0, Id source, const GraphOptions& options = {});

/// Whether a path of at most k edges joins source and target once every
/// member is expanded by r (edge iff critical_value <= r).
bool rsp_decision(const Scene& scene, Id source, Id target, std::size_t k, double r,
                  const GraphOptions& options = {}, std::vector<Id>* path = nullptr);

struct RspResult {
    double r_star = 0.0;
    std::vector<Id> path;
    std::size_t hops = 0;
};

/// Smallest critical value admitting a <= k-hop path. Throws NoPath when
/// even the largest one does not.
RspResult rsp_solve(const Scene& scene, Id source, Id target, std::size_t k,
                    const GraphOptions& options = {});

}  // namespace hprox
