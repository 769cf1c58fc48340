#pragma once

// Deletion-capable intersection-detection tree over shallow cuttings.
//
// Every internal node partitions its members into parts G_1..G_u. Part i
// carries a cutting built for the residue left by the earlier parts and
// keeps only the members that cross at most kappa of its prisms; the rest
// fall through to the next part. A prism's child is the subtree over its
// conflict list. Deletions walk the crossing lists L_f top-down, and a node
// rebuilds itself after ceil(nu / 2t) deletions have reached it.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hprox/cutting.hpp"
#include "hprox/geometry.hpp"

namespace hprox {

struct FastConfig {
    // Box prisms need a wide band above the ceiling to stay few, so the
    // default trades a larger t for c = 8: children still shrink to nu/2.
    double t = 16.0;
    double beta = 4.0;
    double c_conflict = 8.0;
    int cutting_depth = 6;          // octree depth limit inside each node cutting
    std::size_t leaf_size = 160;    // n0: smaller sets are scanned
    std::size_t max_tree_depth = 8;
    std::uint64_t seed = 1;

    void validate() const;
};

struct RebuildEvent {
    std::uint64_t node = 0;
    int depth = 0;
    std::size_t nu_at_build = 0;
    std::size_t chi_at_build = 0;
    std::size_t deletions = 0;  // deletions that reached the node since its last build
    std::size_t nu_after = 0;
};

struct FastStats {
    std::size_t nodes = 0;
    std::size_t leaves = 0;
    std::size_t depth = 0;
    std::size_t prisms = 0;
    std::size_t flagged_prisms = 0;
    std::size_t stored_ids = 0;  // total conflict-list and leaf-list entries
    std::vector<std::size_t> parts_per_node;
    std::vector<double> kappas;
};

struct AuditReport {
    bool ok = true;
    std::vector<std::string> violations;
    void fail(std::string msg) {
        ok = false;
        if (violations.size() < 32) violations.push_back(std::move(msg));
    }
};

class FastTree {
public:
    using Storage = std::vector<Homothet>;

    FastTree(ConvexBody body, std::shared_ptr<const Storage> storage, std::vector<Id> members,
             FastConfig config = {});

    std::optional<Id> detect(const Homothet& query) const;
    /// Sorted ids of live members intersecting the query.
    std::vector<Id> report(const Homothet& query) const;
    /// Throws std::out_of_range for unknown or already deleted ids.
    void remove(Id id);

    bool live(Id id) const { return id < alive_.size() && alive_[id]; }
    std::size_t live_count() const { return live_count_; }
    std::vector<Id> live_members() const;
    std::size_t built_size() const { return built_size_; }

    const std::vector<RebuildEvent>& rebuild_log() const { return rebuilds_; }
    /// Number of times the brute fallback ran because a ceiling point had no
    /// live witness in its prism.
    std::size_t fallback_scans() const { return fallbacks_; }

    FastStats stats() const;
    /// Bytes of one tree node and of one prism record, for memory reports.
    static std::size_t node_bytes();
    static std::size_t prism_bytes();
    /// Checks the node invariants, the part partition and conflict-list
    /// hygiene:
    ///   P1  the rebuild counter starts at ceil(nu / 2t) and tracks deletions;
    ///   P3  every unflagged prism lists at most c nu_i / t_i members;
    ///   P4  every part member crosses at most kappa of its part's prisms.
    AuditReport audit() const;
    /// Audits only the subtree of the node with the given uid (as recorded
    /// in rebuild events); reports a violation if no such node exists.
    AuditReport audit_subtree(std::uint64_t uid) const;

    /// A prism (with a ceiling) of the root's first part, for targeted tests.
    struct PrismRef {
        Box3 box;
        Id ceiling;
        std::vector<Id> conflict;
    };
    std::optional<PrismRef> root_prism(std::size_t index) const;
    std::size_t root_prism_count() const;

private:
    struct Node;
    struct Part {
        std::vector<Id> members;  // live, sorted
        Cutting cutting;
        std::vector<std::unique_ptr<Node>> children;  // per prism; null scans the list
        std::unordered_map<Id, std::vector<std::uint32_t>> crossing;  // L_f
        double kappa = 0.0;
    };
    struct Node {
        std::uint64_t uid = 0;
        int depth = 0;
        Box3 domain;
        bool leaf = true;
        std::vector<Id> members;  // live, sorted
        std::vector<Part> parts;
        std::unordered_map<Id, std::uint32_t> part_of;
        std::size_t nu_at_build = 0;
        std::size_t chi_at_build = 0;
        std::size_t chi = 0;
        std::size_t deletions = 0;
    };

    std::unique_ptr<Node> build(std::vector<Id> members, const Box3& domain, int depth,
                                std::uint64_t uid);
    void populate(Node& node, std::vector<Id> members);
    void remove_from(Node& node, Id id);

    bool hits(Id id, const Homothet& q) const;
    std::optional<Id> scan(const std::vector<Id>& ids, const Homothet& q) const;
    void scan_all(const std::vector<Id>& ids, const Homothet& q, std::vector<Id>& out) const;
    std::optional<Id> detect_in(const Node& node, const Homothet& q) const;
    void report_in(const Node& node, const Homothet& q, std::vector<Id>& out) const;

    void collect_stats(const Node& node, FastStats& s) const;
    void audit_node(const Node& node, AuditReport& r) const;
    const Node* find_node(const Node& node, std::uint64_t uid) const;

    ConvexBody body_;
    std::shared_ptr<const Storage> storage_;
    FastConfig config_;
    std::unique_ptr<Node> root_;
    std::vector<char> alive_;
    std::size_t live_count_ = 0;
    std::size_t built_size_ = 0;
    std::uint64_t next_uid_ = 0;
    std::vector<RebuildEvent> rebuilds_;
    // Scratch map from member id to its position in the residue being
    // partitioned; sized on the first internal build.
    std::vector<std::uint32_t> slot_;
    mutable std::atomic<std::size_t> fallbacks_{0};
};

}  // namespace hprox
