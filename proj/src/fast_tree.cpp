#include "hprox/fast_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hprox {

namespace {

double slack_for(double v) { return 1e-9 * (1.0 + std::abs(v)); }

void erase_sorted(std::vector<Id>& v, Id id) {
    const auto it = std::lower_bound(v.begin(), v.end(), id);
    if (it != v.end() && *it == id) v.erase(it);
}

bool has_sorted(const std::vector<Id>& v, Id id) { return std::binary_search(v.begin(), v.end(), id); }

Box3 tree_domain(const std::vector<Homothet>& storage, const std::vector<Id>& members) {
    Box3 box{{0, 0, 0}, {0, 0, 0}};
    if (members.empty()) return box;
    box = {storage[members.front()].center, storage[members.front()].center};
    double max_size = 0.0;
    for (Id id : members) {
        box.expand(storage[id].center);
        max_size = std::max(max_size, storage[id].size);
    }
    const Vec3 e = box.extent();
    box.inflate(max_size + 0.05 * std::max({e.x, e.y, e.z}) + 1e-9);
    return box;
}

}  // namespace

void FastConfig::validate() const {
    if (!(t >= 2.0)) throw std::invalid_argument("fast tree: t must be >= 2");
    if (!(beta >= 1.0)) throw std::invalid_argument("fast tree: beta must be >= 1");
    if (!(c_conflict >= 2.0)) throw std::invalid_argument("fast tree: c_conflict must be >= 2");
    if (leaf_size < 1) throw std::invalid_argument("fast tree: leaf_size must be >= 1");
}

FastTree::FastTree(ConvexBody body, std::shared_ptr<const Storage> storage, std::vector<Id> members,
                   FastConfig config)
    : body_(std::move(body)), storage_(std::move(storage)), config_(config) {
    config_.validate();
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (Id id : members) {
        if (id >= storage_->size()) throw std::out_of_range("fast tree: member id outside storage");
        if (id >= alive_.size()) alive_.resize(id + 1, 0);
        alive_[id] = 1;
    }
    live_count_ = built_size_ = members.size();
    const Box3 domain = tree_domain(*storage_, members);
    root_ = build(std::move(members), domain, 0, next_uid_++);
}

std::unique_ptr<FastTree::Node> FastTree::build(std::vector<Id> members, const Box3& domain,
                                                int depth, std::uint64_t uid) {
    auto node = std::make_unique<Node>();
    node->uid = uid;
    node->depth = depth;
    node->domain = domain;
    populate(*node, std::move(members));
    return node;
}

void FastTree::populate(Node& node, std::vector<Id> members) {
    const Storage& storage = *storage_;
    node.members = std::move(members);
    node.parts.clear();
    node.part_of.clear();
    node.deletions = 0;
    const std::size_t nu = node.members.size();
    node.nu_at_build = nu;
    if (nu <= config_.leaf_size || static_cast<std::size_t>(node.depth) >= config_.max_tree_depth) {
        node.leaf = true;
        node.chi = node.chi_at_build = 0;
        return;
    }
    node.leaf = false;
    const double t = config_.t;
    node.chi = node.chi_at_build =
        static_cast<std::size_t>(std::ceil(static_cast<double>(nu) / (2.0 * t)));

    std::vector<Id> remaining = node.members;
    while (!remaining.empty()) {
        const std::size_t nu_i = remaining.size();
        const auto part_index = static_cast<std::uint32_t>(node.parts.size());
        Part part;
        if (static_cast<double>(nu_i) <= static_cast<double>(nu) / t) {
            // Residue: a trivial cutting whose single prism lists everything.
            CuttingConfig trivial;
            trivial.t = std::max(1.0, static_cast<double>(nu_i));
            trivial.c_conflict = std::max(2.0, config_.c_conflict);
            trivial.level_depth = 0;
            part.cutting = Cutting::build(body_, storage, remaining, node.domain, trivial);
            part.kappa = 1.0;
            for (Id f : remaining) {
                part.crossing[f] = {0};
                node.part_of[f] = part_index;
            }
            part.children.resize(1);
            part.members = std::move(remaining);
            node.parts.push_back(std::move(part));
            break;
        }
        CuttingConfig cc;
        cc.t = t * static_cast<double>(nu_i) / static_cast<double>(nu);
        cc.beta = config_.beta;
        // With c >= t the root bound c nu / t would admit every member;
        // capping c at max(3, t / 2) keeps children a fixed fraction smaller.
        cc.c_conflict = std::min(config_.c_conflict, std::max(3.0, t / 2.0));
        cc.max_depth = config_.cutting_depth;
        cc.level_depth = 0;  // queries only need sound conflict lists
        cc.seed = CounterRng::mix(config_.seed ^ CounterRng::mix(node.uid * 64 + part_index));
        Cutting cutting = Cutting::build(body_, storage, remaining, node.domain, cc);

        std::vector<std::size_t> count(nu_i, 0);
        if (slot_.size() < alive_.size()) slot_.resize(alive_.size());
        for (std::size_t k = 0; k < nu_i; ++k) slot_[remaining[k]] = static_cast<std::uint32_t>(k);
        auto pos = [&](Id f) { return static_cast<std::size_t>(slot_[f]); };
        std::size_t total = 0;
        for (const auto& p : cutting.prisms())
            for (Id f : p.conflict) {
                ++count[pos(f)];
                ++total;
            }
        // Twice the average crossing count; by Markov at most half the
        // residue is bad, and the doubling loop only guards degenerate input.
        double kappa = 2.0 * static_cast<double>(total) / static_cast<double>(nu_i);
        std::vector<char> good(nu_i, 1);
        for (;;) {
            std::size_t bad = 0;
            for (std::size_t k = 0; k < nu_i; ++k) {
                good[k] = static_cast<double>(count[k]) <= kappa;
                bad += !good[k];
            }
            if (2 * bad <= nu_i) break;
            kappa *= 2.0;
        }
        std::vector<Id> keep, rest;
        for (std::size_t k = 0; k < nu_i; ++k) (good[k] ? keep : rest).push_back(remaining[k]);
        cutting.filter_conflicts([&](Id f) { return good[pos(f)] != 0; });
        part.kappa = kappa;
        for (Id f : keep) node.part_of[f] = part_index;
        const auto& prisms = cutting.prisms();
        part.children.resize(prisms.size());
        for (std::uint32_t pi = 0; pi < prisms.size(); ++pi) {
            const Prism& p = prisms[pi];
            for (Id f : p.conflict) part.crossing[f].push_back(pi);
            if (p.ceiling && !p.flagged && p.conflict.size() > config_.leaf_size &&
                p.conflict.size() < nu)
                part.children[pi] = build(p.conflict, p.box, node.depth + 1, next_uid_++);
        }
        part.members = std::move(keep);
        part.cutting = std::move(cutting);
        node.parts.push_back(std::move(part));
        remaining = std::move(rest);
    }
}

void FastTree::remove(Id id) {
    if (!live(id)) throw std::out_of_range("fast tree: unknown or deleted id " + std::to_string(id));
    alive_[id] = 0;
    --live_count_;
    remove_from(*root_, id);
}

void FastTree::remove_from(Node& node, Id id) {
    erase_sorted(node.members, id);
    if (node.leaf) return;
    ++node.deletions;
    if (--node.chi == 0) {
        rebuilds_.push_back({node.uid, node.depth, node.nu_at_build, node.chi_at_build,
                             node.deletions, node.members.size()});
        std::vector<Id> current = node.members;
        populate(node, std::move(current));
        return;
    }
    const auto it = node.part_of.find(id);
    if (it == node.part_of.end()) return;
    Part& part = node.parts[it->second];
    node.part_of.erase(it);
    erase_sorted(part.members, id);
    const auto cross = part.crossing.find(id);
    if (cross == part.crossing.end()) return;
    for (std::uint32_t pi : cross->second) {
        part.cutting.erase_conflict(pi, id);
        if (part.children[pi]) remove_from(*part.children[pi], id);
    }
    part.crossing.erase(cross);
}

bool FastTree::hits(Id id, const Homothet& q) const {
    return live(id) && intersects(body_, (*storage_)[id], q);
}

std::optional<Id> FastTree::scan(const std::vector<Id>& ids, const Homothet& q) const {
    for (Id id : ids)
        if (hits(id, q)) return id;
    return std::nullopt;
}

void FastTree::scan_all(const std::vector<Id>& ids, const Homothet& q, std::vector<Id>& out) const {
    for (Id id : ids)
        if (hits(id, q)) out.push_back(id);
}

std::optional<Id> FastTree::detect(const Homothet& query) const {
    if (live_count_ == 0) return std::nullopt;
    return detect_in(*root_, query);
}

std::optional<Id> FastTree::detect_in(const Node& node, const Homothet& q) const {
    if (node.leaf || !node.domain.contains(q.center)) return scan(node.members, q);
    for (const Part& part : node.parts) {
        if (part.members.empty()) continue;
        const std::size_t pi = *part.cutting.locate(q.center);
        const Prism& prism = part.cutting.prisms()[pi];
        if (!prism.ceiling) {
            if (auto w = scan(prism.conflict, q)) return w;
            continue;
        }
        const double ceil = point_distance(body_, (*storage_)[*prism.ceiling], q.center);
        if (q.size >= ceil - slack_for(ceil)) {
            // At or above the ceiling: the ceiling function itself is a
            // witness while it lives; otherwise look for a live one below.
            if (hits(*prism.ceiling, q)) return *prism.ceiling;
            if (auto w = scan(prism.conflict, q)) return w;
            fallbacks_.fetch_add(1, std::memory_order_relaxed);
            if (auto w = scan(part.members, q)) return w;
            continue;
        }
        if (const auto& child = part.children[pi]) {
            if (auto w = detect_in(*child, q)) return w;
            continue;
        }
        if (auto w = scan(prism.conflict, q)) return w;
    }
    return std::nullopt;
}

std::vector<Id> FastTree::report(const Homothet& query) const {
    std::vector<Id> out;
    if (live_count_ > 0) report_in(*root_, query, out);
    std::sort(out.begin(), out.end());
    return out;
}

void FastTree::report_in(const Node& node, const Homothet& q, std::vector<Id>& out) const {
    if (node.leaf || !node.domain.contains(q.center)) return scan_all(node.members, q, out);
    for (const Part& part : node.parts) {
        if (part.members.empty()) continue;
        const std::size_t pi = *part.cutting.locate(q.center);
        const Prism& prism = part.cutting.prisms()[pi];
        if (!prism.ceiling) {
            scan_all(prism.conflict, q, out);
            continue;
        }
        const double ceil = point_distance(body_, (*storage_)[*prism.ceiling], q.center);
        if (q.size >= ceil - slack_for(ceil)) {
            // Above a ceiling of level ~nu/t, so the output is that large too.
            scan_all(part.members, q, out);
        } else if (const auto& child = part.children[pi]) {
            report_in(*child, q, out);
        } else {
            scan_all(prism.conflict, q, out);
        }
    }
}

std::vector<Id> FastTree::live_members() const { return root_->members; }

void FastTree::collect_stats(const Node& node, FastStats& s) const {
    ++s.nodes;
    s.depth = std::max(s.depth, static_cast<std::size_t>(node.depth) + 1);
    if (node.leaf) {
        ++s.leaves;
        s.stored_ids += node.members.size();
        return;
    }
    s.parts_per_node.push_back(node.parts.size());
    for (const Part& part : node.parts) {
        s.kappas.push_back(part.kappa);
        s.prisms += part.cutting.prisms().size();
        s.flagged_prisms += part.cutting.flagged_count();
        s.stored_ids += part.cutting.total_conflict();
        for (const auto& child : part.children)
            if (child) collect_stats(*child, s);
    }
}

std::size_t FastTree::node_bytes() { return sizeof(Node) + sizeof(Part); }
std::size_t FastTree::prism_bytes() { return sizeof(Prism); }

FastStats FastTree::stats() const {
    FastStats s;
    collect_stats(*root_, s);
    return s;
}

void FastTree::audit_node(const Node& node, AuditReport& r) const {
    const std::string where = "node " + std::to_string(node.uid);
    for (Id id : node.members)
        if (!live(id)) r.fail(where + ": dead member " + std::to_string(id));
    if (node.leaf) return;
    const auto expected_chi =
        static_cast<std::size_t>(std::ceil(static_cast<double>(node.nu_at_build) / (2.0 * config_.t)));
    if (node.chi_at_build != expected_chi) r.fail(where + ": P1 counter not ceil(nu/2t) at build");
    if (node.chi + node.deletions != node.chi_at_build || node.chi == 0)
        r.fail(where + ": counter out of step with deletions");
    if (node.parts.size() > static_cast<std::size_t>(std::ceil(std::log2(config_.t))) + 1)
        r.fail(where + ": too many parts");
    std::size_t in_parts = 0;
    for (std::size_t i = 0; i < node.parts.size(); ++i) {
        const Part& part = node.parts[i];
        in_parts += part.members.size();
        for (Id f : part.members) {
            const auto it = node.part_of.find(f);
            if (it == node.part_of.end() || it->second != i || !has_sorted(node.members, f))
                r.fail(where + ": part bookkeeping broken for " + std::to_string(f));
            const auto cross = part.crossing.find(f);
            const std::size_t nc = cross == part.crossing.end() ? 0 : cross->second.size();
            if (static_cast<double>(nc) > part.kappa)
                r.fail(where + ": P4 violated by " + std::to_string(f));
        }
        const auto& prisms = part.cutting.prisms();
        for (std::size_t pi = 0; pi < prisms.size(); ++pi) {
            const Prism& p = prisms[pi];
            if (!p.flagged && p.ceiling &&
                static_cast<double>(p.conflict.size()) > part.cutting.conflict_bound() + 1e-9)
                r.fail(where + ": P3 violated");
            for (Id f : p.conflict) {
                if (!has_sorted(part.members, f)) r.fail(where + ": conflict entry outside part");
                const auto cross = part.crossing.find(f);
                if (cross == part.crossing.end() ||
                    std::find(cross->second.begin(), cross->second.end(), pi) == cross->second.end())
                    r.fail(where + ": crossing list misses a prism");
            }
            if (const auto& child = part.children[pi]) {
                if (child->members != p.conflict) r.fail(where + ": child set differs from conflict list");
                audit_node(*child, r);
            }
        }
    }
    if (in_parts != node.members.size()) r.fail(where + ": parts do not partition the members");
}

AuditReport FastTree::audit() const {
    AuditReport r;
    std::size_t alive = 0;
    for (char a : alive_) alive += a != 0;
    if (alive != live_count_) r.fail("live count mismatch");
    if (root_->members.size() != live_count_) r.fail("root member count mismatch");
    audit_node(*root_, r);
    return r;
}

const FastTree::Node* FastTree::find_node(const Node& node, std::uint64_t uid) const {
    if (node.uid == uid) return &node;
    for (const Part& part : node.parts)
        for (const auto& child : part.children)
            if (child)
                if (const Node* hit = find_node(*child, uid)) return hit;
    return nullptr;
}

AuditReport FastTree::audit_subtree(std::uint64_t uid) const {
    AuditReport r;
    if (const Node* node = find_node(*root_, uid))
        audit_node(*node, r);
    else
        r.fail("node " + std::to_string(uid) + " not found");
    return r;
}

std::size_t FastTree::root_prism_count() const {
    if (root_->leaf || root_->parts.empty()) return 0;
    return root_->parts.front().cutting.prisms().size();
}

std::optional<FastTree::PrismRef> FastTree::root_prism(std::size_t index) const {
    if (index >= root_prism_count()) return std::nullopt;
    const Prism& p = root_->parts.front().cutting.prisms()[index];
    if (!p.ceiling) return std::nullopt;
    return PrismRef{p.box, *p.ceiling, p.conflict};
}

}  // namespace hprox
