#include "hprox/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hprox {

std::string to_string(StructureKind kind) {
    switch (kind) {
        case StructureKind::fast: return "fast";
        case StructureKind::grouped: return "grouped";
        case StructureKind::linear: return "linear";
        case StructureKind::oracle: return "oracle";
    }
    return "unknown";
}

StructureKind parse_structure(const std::string& name) {
    if (name == "fast") return StructureKind::fast;
    if (name == "grouped") return StructureKind::grouped;
    if (name == "linear") return StructureKind::linear;
    if (name == "oracle") return StructureKind::oracle;
    throw std::invalid_argument("unknown structure '" + name + "' (fast|grouped|linear|oracle)");
}

// ---------------------------------------------------------------------------

ProximityIndex::ProximityIndex(ConvexBody body, const std::vector<Homothet>& members)
    : body_(std::move(body)),
      storage_(std::make_shared<Storage>(members)),
      alive_(members.size(), 1),
      live_count_(members.size()) {
    for (const auto& h : members) {
        if (!(h.size >= 0.0) || !std::isfinite(h.size))
            throw SceneError("homothet size must be finite and nonnegative");
        max_size_ = std::max(max_size_, h.size);
    }
}

std::vector<Id> ProximityIndex::initial_ids() const {
    std::vector<Id> ids(alive_.size());
    std::iota(ids.begin(), ids.end(), Id{0});
    return ids;
}

Id ProximityIndex::insert(const Homothet& h) {
    if (!(h.size >= 0.0) || !std::isfinite(h.size))
        throw SceneError("homothet size must be finite and nonnegative");
    const Id id = storage_->size();
    storage_->push_back(h);
    alive_.push_back(1);
    if (live_count_++ == 0) first_live_ = id;
    max_size_ = std::max(max_size_, h.size);
    do_insert(id);
    return id;
}

void ProximityIndex::remove(Id id) {
    if (!live(id)) throw std::out_of_range("index: unknown or deleted id " + std::to_string(id));
    do_remove(id);
    alive_[id] = 0;
    --live_count_;
    // New ids are always larger, so the smallest live id only moves forward.
    while (first_live_ < alive_.size() && !alive_[first_live_]) ++first_live_;
}

std::optional<Id> ProximityIndex::first_live() const {
    if (live_count_ == 0) return std::nullopt;
    return first_live_;
}

// ---------------------------------------------------------------------------

OracleIndex::OracleIndex(ConvexBody body, const std::vector<Homothet>& members)
    : ProximityIndex(std::move(body), members) {}

std::optional<Id> OracleIndex::detect(const Homothet& q) const {
    for (Id id = 0; id < id_bound(); ++id)
        if (live(id) && intersects(body(), member(id), q)) return id;
    return std::nullopt;
}

std::vector<Id> OracleIndex::report(const Homothet& q) const {
    std::vector<Id> out;
    for (Id id = 0; id < id_bound(); ++id)
        if (live(id) && intersects(body(), member(id), q)) out.push_back(id);
    return out;
}

nlohmann::json OracleIndex::stats() const {
    return {{"structure", "oracle"}, {"live", live_count()}, {"nodes", 0},
            {"bucket_bytes", id_bound() * sizeof(Homothet)},
            {"memory_bytes", id_bound() * sizeof(Homothet)}};
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json tree_stats(const FastTree& t) {
    const FastStats s = t.stats();
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : t.rebuild_log())
        events.push_back({{"node", e.node},
                          {"depth", e.depth},
                          {"nu_at_build", e.nu_at_build},
                          {"chi_at_build", e.chi_at_build},
                          {"deletions", e.deletions},
                          {"nu_after", e.nu_after}});
    return {{"nodes", s.nodes},
            {"depth", s.depth},
            {"prisms", s.prisms},
            {"flagged_prisms", s.flagged_prisms},
            {"stored_ids", s.stored_ids},
            {"bucket_bytes", s.stored_ids * sizeof(Id)},
            {"memory_bytes", s.nodes * FastTree::node_bytes() + s.prisms * FastTree::prism_bytes() +
                                 s.stored_ids * sizeof(Id)},
            {"parts_per_node", s.parts_per_node},
            {"kappas", s.kappas},
            {"rebuild_events", events},
            {"fallback_scans", t.fallback_scans()}};
}

nlohmann::json tree_stats(const PruneTree& t) {
    const PruneStats s = t.stats();
    return {{"nodes", s.nodes},
            {"buckets", s.buckets},
            {"depth", s.depth},
            {"bucket_bytes", s.bucket_bytes},
            {"memory_bytes", s.nodes * PruneTree::node_bytes() + s.bucket_bytes},
            {"rebuilds", s.rebuilds}};
}

std::uint64_t layer_seed(std::uint64_t seed, std::size_t salt) {
    return CounterRng::mix(seed ^ CounterRng::mix(0x1a7e4 + salt));
}

template <class Config>
Config reseeded(Config c, std::size_t) {
    return c;
}
template <>
FastConfig reseeded(FastConfig c, std::size_t salt) {
    c.seed = layer_seed(c.seed, salt);
    return c;
}

}  // namespace

template <class Tree, class Config>
LayeredIndex<Tree, Config>::LayeredIndex(ConvexBody body, const std::vector<Homothet>& members,
                                         Config config, StructureKind kind)
    : ProximityIndex(std::move(body), members), config_(config), kind_(kind) {
    layer_of_.assign(members.size(), 0);
    if (members.empty()) return;
    std::size_t level = 0;
    while ((std::size_t{1} << level) < members.size()) ++level;
    place(level, initial_ids());
}

template <class Tree, class Config>
void LayeredIndex<Tree, Config>::place(std::size_t level, std::vector<Id> members) {
    if (layers_.size() <= level) layers_.resize(level + 1);
    for (Id id : members) {
        if (id >= layer_of_.size()) layer_of_.resize(id + 1, 0);
        layer_of_[id] = level;
    }
    layers_[level] = std::make_unique<Tree>(body(), storage(), std::move(members),
                                            reseeded(config_, merges_++));
}

template <class Tree, class Config>
void LayeredIndex<Tree, Config>::do_insert(Id id) {
    std::vector<Id> carry{id};
    std::size_t j = 0;
    for (; j < layers_.size() && layers_[j]; ++j) {
        const auto ids = layers_[j]->live_members();
        carry.insert(carry.end(), ids.begin(), ids.end());
        layers_[j].reset();
    }
    std::sort(carry.begin(), carry.end());
    place(j, std::move(carry));
}

template <class Tree, class Config>
void LayeredIndex<Tree, Config>::do_remove(Id id) {
    Tree& t = *layers_[layer_of_[id]];
    t.remove(id);
}

template <class Tree, class Config>
std::optional<Id> LayeredIndex<Tree, Config>::detect(const Homothet& q) const {
    for (const auto& t : layers_)
        if (t && t->live_count() > 0)
            if (auto w = t->detect(q)) return w;
    return std::nullopt;
}

template <class Tree, class Config>
std::vector<Id> LayeredIndex<Tree, Config>::report(const Homothet& q) const {
    std::vector<Id> out;
    for (const auto& t : layers_)
        if (t && t->live_count() > 0) {
            const auto part = t->report(q);
            out.insert(out.end(), part.begin(), part.end());
        }
    std::sort(out.begin(), out.end());
    return out;
}

template <class Tree, class Config>
std::vector<std::size_t> LayeredIndex<Tree, Config>::layer_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& t : layers_) out.push_back(t ? t->built_size() : 0);
    return out;
}

template <class Tree, class Config>
bool LayeredIndex<Tree, Config>::audit_layers() const {
    std::vector<int> seen(id_bound(), 0);
    for (std::size_t j = 0; j < layers_.size(); ++j) {
        if (!layers_[j]) continue;
        if (layers_[j]->built_size() > (std::size_t{1} << j)) return false;
        for (Id id : layers_[j]->live_members()) {
            if (id >= seen.size() || layer_of_[id] != j) return false;
            ++seen[id];
        }
    }
    for (Id id = 0; id < seen.size(); ++id)
        if (seen[id] != (live(id) ? 1 : 0)) return false;
    return true;
}

template <class Tree, class Config>
nlohmann::json LayeredIndex<Tree, Config>::stats() const {
    nlohmann::json layers = nlohmann::json::array();
    std::size_t nodes = 0, bytes = 0, memory = 0;
    for (std::size_t j = 0; j < layers_.size(); ++j) {
        if (!layers_[j]) continue;
        auto s = tree_stats(*layers_[j]);
        nodes += s["nodes"].template get<std::size_t>();
        bytes += s["bucket_bytes"].template get<std::size_t>();
        memory += s["memory_bytes"].template get<std::size_t>();
        s["level"] = j;
        s["built"] = layers_[j]->built_size();
        s["live"] = layers_[j]->live_count();
        layers.push_back(std::move(s));
    }
    return {{"structure", to_string(kind_)}, {"live", live_count()}, {"nodes", nodes},
            {"bucket_bytes", bytes},         {"memory_bytes", memory}, {"merges", merges_},
            {"layers", layers}};
}

template class LayeredIndex<FastTree, FastConfig>;
template class LayeredIndex<PruneTree, PruneConfig>;

// ---------------------------------------------------------------------------

GroupedIndex::GroupedIndex(ConvexBody body, const std::vector<Homothet>& members,
                           std::size_t group_size, FastConfig config)
    : ProximityIndex(std::move(body), members), group_size_(group_size), config_(config) {
    if (group_size_ == 0)
        group_size_ = static_cast<std::size_t>(
            std::ceil(std::cbrt(static_cast<double>(std::max<std::size_t>(members.size(), 1)))));
    group_of_.assign(members.size(), 0);
    for (std::size_t begin = 0; begin < members.size(); begin += group_size_) {
        std::vector<Id> ids;
        for (Id id = begin; id < std::min(members.size(), begin + group_size_); ++id) {
            ids.push_back(id);
            group_of_[id] = groups_.size();
        }
        group_ids_.push_back(ids);
        FastConfig c = config_;
        c.seed = layer_seed(config_.seed, groups_.size());
        groups_.push_back(std::make_unique<FastTree>(this->body(), storage(), std::move(ids), c));
    }
}

void GroupedIndex::do_insert(Id id) {
    if (group_ids_.empty() || group_ids_.back().size() >= group_size_) {
        group_ids_.emplace_back();
        groups_.emplace_back();
    }
    const std::size_t g = groups_.size() - 1;
    group_ids_[g].push_back(id);
    if (id >= group_of_.size()) group_of_.resize(id + 1, 0);
    group_of_[id] = g;
    std::vector<Id> live_ids = groups_[g] ? groups_[g]->live_members() : std::vector<Id>{};
    live_ids.push_back(id);
    FastConfig c = config_;
    c.seed = layer_seed(config_.seed, g * 7919 + group_ids_[g].size());
    groups_[g] = std::make_unique<FastTree>(body(), storage(), std::move(live_ids), c);
}

void GroupedIndex::do_remove(Id id) { groups_[group_of_[id]]->remove(id); }

std::optional<Id> GroupedIndex::detect(const Homothet& q) const {
    for (const auto& t : groups_)
        if (t->live_count() > 0)
            if (auto w = t->detect(q)) return w;
    return std::nullopt;
}

std::vector<Id> GroupedIndex::report(const Homothet& q) const {
    std::vector<Id> out;
    for (const auto& t : groups_)
        if (t->live_count() > 0) {
            const auto part = t->report(q);
            out.insert(out.end(), part.begin(), part.end());
        }
    std::sort(out.begin(), out.end());
    return out;
}

nlohmann::json GroupedIndex::stats() const {
    std::size_t nodes = 0, bytes = 0, memory = 0, rebuilds = 0;
    for (const auto& t : groups_) {
        const FastStats s = t->stats();
        nodes += s.nodes;
        bytes += s.stored_ids * sizeof(Id);
        memory += s.nodes * FastTree::node_bytes() + s.prisms * FastTree::prism_bytes() +
                  s.stored_ids * sizeof(Id);
        rebuilds += t->rebuild_log().size();
    }
    return {{"structure", "grouped"}, {"live", live_count()},   {"nodes", nodes},
            {"bucket_bytes", bytes},  {"memory_bytes", memory},   {"groups", groups_.size()},
            {"group_size", group_size_},
            {"rebuild_events", rebuilds}};
}

// ---------------------------------------------------------------------------

std::unique_ptr<ProximityIndex> make_index(StructureKind kind, const ConvexBody& body,
                                           const std::vector<Homothet>& members,
                                           const IndexOptions& options) {
    switch (kind) {
        case StructureKind::fast:
            return std::make_unique<FastIndex>(body, members, options.fast, kind);
        case StructureKind::linear:
            return std::make_unique<LinearIndex>(body, members, options.prune, kind);
        case StructureKind::grouped:
            return std::make_unique<GroupedIndex>(body, members, options.group_size, options.fast);
        case StructureKind::oracle:
            return std::make_unique<OracleIndex>(body, members);
    }
    throw std::invalid_argument("make_index: unknown structure");
}

BudgetChoice structure_for_budget(std::size_t n, double budget) {
    const double nn = static_cast<double>(std::max<std::size_t>(n, 1));
    if (!(budget > 0.0)) throw std::invalid_argument("storage budget must be positive");
    if (budget <= 4.0 * nn) return {StructureKind::linear, 0};
    if (budget >= nn * nn) return {StructureKind::fast, 0};
    return {StructureKind::grouped, static_cast<std::size_t>(std::ceil(std::sqrt(budget / nn)))};
}

Neighbor nearest(const ProximityIndex& index, const Homothet& q, double tol) {
    const auto any = index.first_live();
    if (!any) throw EmptySceneError("nearest neighbor of an empty index");
    const ConvexBody& body = index.body();
    // detect(c0, rho0 + r) succeeds iff the nearest distance is <= r.
    double hi = homothet_distance(body, index.member(*any), q);
    double lo = -(q.size + index.max_size()) - 1.0;
    auto grown = [&](double r) { return Homothet{q.center, q.size + r}; };
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (index.detect(grown(mid)))
            hi = mid;
        else
            lo = mid;
    }
    // Every member at distance <= hi is reported; pick the exact minimum.
    const double pad = 1e-9 * (1.0 + std::abs(hi) + std::abs(q.size));
    Neighbor best{*any, std::numeric_limits<double>::infinity()};
    for (Id id : index.report(grown(hi + pad))) {
        const double d = homothet_distance(body, index.member(id), q);
        if (d < best.distance) best = {id, d};
    }
    if (!std::isfinite(best.distance)) best = {*any, homothet_distance(body, index.member(*any), q)};
    return best;
}

}  // namespace hprox
