#pragma once

// Dynamic proximity indexes behind one interface. Every index owns a
// growable member store; ids are positions in that store, the initial
// members keep their scene ids and inserted members get fresh ones.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hprox/fast_tree.hpp"
#include "hprox/geometry.hpp"
#include "hprox/linear_tree.hpp"
#include "hprox/oracle.hpp"
#include "json.hpp"

namespace hprox {

enum class StructureKind { fast, grouped, linear, oracle };

std::string to_string(StructureKind kind);
/// Throws std::invalid_argument for unknown names.
StructureKind parse_structure(const std::string& name);

class ProximityIndex {
public:
    using Storage = std::vector<Homothet>;

    virtual ~ProximityIndex() = default;
    ProximityIndex(const ProximityIndex&) = delete;
    ProximityIndex& operator=(const ProximityIndex&) = delete;

    /// Some live member intersecting the query, if any.
    virtual std::optional<Id> detect(const Homothet& query) const = 0;
    /// All live members intersecting the query, ascending.
    virtual std::vector<Id> report(const Homothet& query) const = 0;
    virtual StructureKind kind() const = 0;
    virtual nlohmann::json stats() const = 0;

    /// Adds a member and returns its id.
    Id insert(const Homothet& h);
    /// Throws std::out_of_range for unknown or already deleted ids.
    void remove(Id id);

    bool live(Id id) const { return id < alive_.size() && alive_[id]; }
    std::size_t live_count() const { return live_count_; }
    /// Smallest live id, if any.
    std::optional<Id> first_live() const;
    const ConvexBody& body() const { return body_; }
    const Homothet& member(Id id) const { return storage_->at(id); }
    std::size_t id_bound() const { return storage_->size(); }
    /// Largest size ever stored (an upper bound over live members).
    double max_size() const { return max_size_; }

protected:
    ProximityIndex(ConvexBody body, const std::vector<Homothet>& members);
    std::shared_ptr<const Storage> storage() const { return storage_; }
    /// Initial members: all ids in [0, n).
    std::vector<Id> initial_ids() const;

    virtual void do_insert(Id id) = 0;
    virtual void do_remove(Id id) = 0;

private:
    ConvexBody body_;
    std::shared_ptr<Storage> storage_;
    std::vector<char> alive_;
    std::size_t live_count_ = 0;
    std::size_t first_live_ = 0;
    double max_size_ = 0.0;
};

struct IndexOptions {
    FastConfig fast;
    PruneConfig prune;
    std::size_t group_size = 0;  // grouped structure; 0 picks ceil(n^(1/3))
};

/// Brute-force scan over the live members.
class OracleIndex final : public ProximityIndex {
public:
    OracleIndex(ConvexBody body, const std::vector<Homothet>& members);
    std::optional<Id> detect(const Homothet& query) const override;
    std::vector<Id> report(const Homothet& query) const override;
    StructureKind kind() const override { return StructureKind::oracle; }
    nlohmann::json stats() const override;

private:
    void do_insert(Id) override {}
    void do_remove(Id) override {}
};

/// Logarithmic method over a deletion-only tree: layer j holds at most 2^j
/// built members; an insertion merges the live members of the occupied
/// prefix of layers into the first empty one.
template <class Tree, class Config>
class LayeredIndex final : public ProximityIndex {
public:
    LayeredIndex(ConvexBody body, const std::vector<Homothet>& members, Config config,
                 StructureKind kind);
    std::optional<Id> detect(const Homothet& query) const override;
    std::vector<Id> report(const Homothet& query) const override;
    StructureKind kind() const override { return kind_; }
    nlohmann::json stats() const override;

    std::size_t layer_count() const { return layers_.size(); }
    const Tree* layer(std::size_t j) const { return layers_[j].get(); }
    /// Built sizes per layer (0 for empty layers).
    std::vector<std::size_t> layer_sizes() const;
    /// Live ids across layers equal the index's live set, each exactly once.
    bool audit_layers() const;

private:
    void do_insert(Id id) override;
    void do_remove(Id id) override;
    void place(std::size_t level, std::vector<Id> members);

    Config config_;
    StructureKind kind_;
    std::vector<std::unique_ptr<Tree>> layers_;
    std::vector<std::size_t> layer_of_;
    std::size_t merges_ = 0;
};

using FastIndex = LayeredIndex<FastTree, FastConfig>;
using LinearIndex = LayeredIndex<PruneTree, PruneConfig>;

/// Members split into consecutive groups of fixed size, one fast tree each;
/// insertions fill the last group (rebuilding it) or open a new one.
class GroupedIndex final : public ProximityIndex {
public:
    GroupedIndex(ConvexBody body, const std::vector<Homothet>& members, std::size_t group_size,
                 FastConfig config);
    std::optional<Id> detect(const Homothet& query) const override;
    std::vector<Id> report(const Homothet& query) const override;
    StructureKind kind() const override { return StructureKind::grouped; }
    nlohmann::json stats() const override;
    std::size_t group_size() const { return group_size_; }
    std::size_t group_count() const { return groups_.size(); }

private:
    void do_insert(Id id) override;
    void do_remove(Id id) override;

    std::size_t group_size_;
    FastConfig config_;
    std::vector<std::unique_ptr<FastTree>> groups_;
    std::vector<std::vector<Id>> group_ids_;  // every id ever placed in the group
    std::vector<std::size_t> group_of_;
};

std::unique_ptr<ProximityIndex> make_index(StructureKind kind, const ConvexBody& body,
                                           const std::vector<Homothet>& members,
                                           const IndexOptions& options = {});
inline std::unique_ptr<ProximityIndex> make_index(StructureKind kind, const Scene& scene,
                                                  const IndexOptions& options = {}) {
    return make_index(kind, scene.body(), scene.members(), options);
}

struct BudgetChoice {
    StructureKind kind = StructureKind::linear;
    std::size_t group_size = 0;
};
/// Maps a storage budget s (in stored entries) to a structure: s <= 4n gives
/// the linear tree, s >= n^2 the single fast tree, and anything between
/// grouped fast trees with group size ceil(sqrt(s / n)).
BudgetChoice structure_for_budget(std::size_t n, double budget);

/// Nearest live member by bisection on the expansion radius with detection
/// queries, followed by an exact scan of the candidates reported within the
/// final radius; ties go to the smallest id. Throws EmptySceneError.
Neighbor nearest(const ProximityIndex& index, const Homothet& query, double tol = 1e-9);

}  // namespace hprox
