#pragma once

// Linear-size pruning tree over the R^4 points (c, rho). A query homothet
// (c0, rho0) intersects member (c, rho) iff dist_K(c0, c) - rho <= rho0, so a
// node whose box keeps that quantity above rho0 is pruned, and a node whose
// box keeps it below rho0 is taken wholesale.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hprox/geometry.hpp"

namespace hprox {

struct PruneConfig {
    std::size_t bucket_size = 16;
    /// Rebuild once fewer than this fraction of the built members are live.
    double rebuild_fraction = 0.5;
};

/// Optional traversal counters.
struct QueryStats {
    std::size_t nodes_visited = 0;
    std::size_t members_tested = 0;
};

struct PruneStats {
    std::size_t nodes = 0;
    std::size_t buckets = 0;
    std::size_t depth = 0;
    std::size_t bucket_bytes = 0;
    std::size_t rebuilds = 0;
};

class PruneTree {
public:
    using Storage = std::vector<Homothet>;

    PruneTree(ConvexBody body, std::shared_ptr<const Storage> storage, std::vector<Id> members,
              PruneConfig config = {});

    std::optional<Id> detect(const Homothet& query, QueryStats* qs = nullptr) const;
    /// Sorted ids of live members intersecting the query.
    std::vector<Id> report(const Homothet& query, QueryStats* qs = nullptr) const;
    /// Throws std::out_of_range for unknown or already deleted ids.
    void remove(Id id);

    bool live(Id id) const { return id < alive_.size() && alive_[id]; }
    std::size_t live_count() const { return live_count_; }
    std::vector<Id> live_members() const;
    std::size_t built_size() const { return order_.size(); }

    PruneStats stats() const;
    static std::size_t node_bytes();
    /// Height bound ceil(log2(n / bucket)) + 2 and box containment.
    bool audit() const;

private:
    struct Node {
        Box3 cbox;
        double rho_lo = 0.0, rho_hi = 0.0;
        std::int32_t left = -1, right = -1, parent = -1;
        std::uint32_t begin = 0, end = 0;  // range of order_
        std::uint32_t live = 0;
    };

    void rebuild(std::vector<Id> members);
    std::int32_t build(std::uint32_t begin, std::uint32_t end, std::int32_t parent, std::size_t depth);
    double lower(const Node& nd, const Vec3& c0) const;
    double upper(const Node& nd, const Vec3& c0) const;
    bool hits(Id id, const Homothet& q) const;

    ConvexBody body_;
    std::shared_ptr<const Storage> storage_;
    PruneConfig config_;
    std::vector<Node> nodes_;
    std::vector<Id> order_;               // members grouped by bucket
    std::vector<std::int32_t> bucket_of_;  // id -> leaf node, -1 if absent
    std::vector<char> alive_;
    std::size_t live_count_ = 0;
    std::size_t depth_ = 0;
    std::size_t rebuilds_ = 0;
};

}  // namespace hprox
