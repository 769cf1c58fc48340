#include "hprox/linear_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hprox {

namespace {

double slack_for(double a, double b) { return 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

double coord(const Homothet& h, int axis) { return axis < 3 ? h.center[axis] : h.size; }

}  // namespace

PruneTree::PruneTree(ConvexBody body, std::shared_ptr<const Storage> storage, std::vector<Id> members,
                     PruneConfig config)
    : body_(std::move(body)), storage_(std::move(storage)), config_(config) {
    if (config_.bucket_size < 1) throw std::invalid_argument("prune tree: bucket_size must be >= 1");
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (Id id : members) {
        if (id >= storage_->size()) throw std::out_of_range("prune tree: member id outside storage");
        if (id >= alive_.size()) alive_.resize(id + 1, 0);
        alive_[id] = 1;
    }
    rebuild(std::move(members));
    rebuilds_ = 0;
}

void PruneTree::rebuild(std::vector<Id> members) {
    ++rebuilds_;
    order_ = std::move(members);
    live_count_ = order_.size();
    nodes_.clear();
    depth_ = 0;
    bucket_of_.assign(alive_.size(), -1);
    if (order_.empty()) return;
    nodes_.reserve(2 * (order_.size() / config_.bucket_size + 1));
    build(0, static_cast<std::uint32_t>(order_.size()), -1, 1);
}

std::int32_t PruneTree::build(std::uint32_t begin, std::uint32_t end, std::int32_t parent,
                              std::size_t depth) {
    const Storage& s = *storage_;
    const auto self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    depth_ = std::max(depth_, depth);
    Node nd;
    nd.parent = parent;
    nd.begin = begin;
    nd.end = end;
    nd.live = end - begin;
    const Homothet& first = s[order_[begin]];
    nd.cbox = {first.center, first.center};
    nd.rho_lo = nd.rho_hi = first.size;
    for (std::uint32_t i = begin; i < end; ++i) {
        const Homothet& h = s[order_[i]];
        nd.cbox.expand(h.center);
        nd.rho_lo = std::min(nd.rho_lo, h.size);
        nd.rho_hi = std::max(nd.rho_hi, h.size);
    }
    if (end - begin <= config_.bucket_size) {
        for (std::uint32_t i = begin; i < end; ++i) bucket_of_[order_[i]] = self;
        nodes_[static_cast<std::size_t>(self)] = nd;
        return self;
    }
    const Vec3 e = nd.cbox.extent();
    const double spans[4] = {e.x, e.y, e.z, nd.rho_hi - nd.rho_lo};
    const int axis = static_cast<int>(std::max_element(spans, spans + 4) - spans);
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Id a, Id b) {
                         const double ca = coord(s[a], axis), cb = coord(s[b], axis);
                         return ca < cb || (ca == cb && a < b);
                     });
    nd.left = build(begin, mid, self, depth + 1);
    nd.right = build(mid, end, self, depth + 1);
    nodes_[static_cast<std::size_t>(self)] = nd;
    return self;
}

double PruneTree::lower(const Node& nd, const Vec3& c0) const {
    return body_.distance_to_box(c0, nd.cbox) - nd.rho_hi;
}

double PruneTree::upper(const Node& nd, const Vec3& c0) const {
    return body_.farthest_in_box(c0, nd.cbox) - nd.rho_lo;
}

bool PruneTree::hits(Id id, const Homothet& q) const {
    return alive_[id] && intersects(body_, (*storage_)[id], q);
}

std::optional<Id> PruneTree::detect(const Homothet& q, QueryStats* qs) const {
    if (live_count_ == 0) return std::nullopt;
    std::int32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& nd = nodes_[static_cast<std::size_t>(stack[--top])];
        if (qs) ++qs->nodes_visited;
        if (nd.live == 0) continue;
        const double lo = lower(nd, q.center);
        if (lo > q.size + slack_for(lo, q.size)) continue;
        if (nd.left < 0 || upper(nd, q.center) <= q.size - slack_for(q.size, q.size)) {
            // Bucket, or a subtree lying entirely inside the query's region:
            // every live member is a candidate; the exact predicate decides.
            for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
                if (qs && alive_[order_[i]]) ++qs->members_tested;
                if (hits(order_[i], q)) return order_[i];
            }
            continue;
        }
        // Visit the nearer child first.
        const Node& l = nodes_[static_cast<std::size_t>(nd.left)];
        const Node& r = nodes_[static_cast<std::size_t>(nd.right)];
        const bool left_first = lower(l, q.center) <= lower(r, q.center);
        stack[top++] = left_first ? nd.right : nd.left;
        stack[top++] = left_first ? nd.left : nd.right;
    }
    return std::nullopt;
}

std::vector<Id> PruneTree::report(const Homothet& q, QueryStats* qs) const {
    std::vector<Id> out;
    if (live_count_ == 0) return out;
    std::int32_t stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& nd = nodes_[static_cast<std::size_t>(stack[--top])];
        if (qs) ++qs->nodes_visited;
        if (nd.live == 0) continue;
        const double lo = lower(nd, q.center);
        if (lo > q.size + slack_for(lo, q.size)) continue;
        if (nd.left < 0 || upper(nd, q.center) <= q.size - slack_for(q.size, q.size)) {
            for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
                if (qs && alive_[order_[i]]) ++qs->members_tested;
                if (hits(order_[i], q)) out.push_back(order_[i]);
            }
            continue;
        }
        stack[top++] = nd.right;
        stack[top++] = nd.left;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void PruneTree::remove(Id id) {
    if (!live(id)) throw std::out_of_range("prune tree: unknown or deleted id " + std::to_string(id));
    alive_[id] = 0;
    --live_count_;
    for (std::int32_t v = bucket_of_[id]; v >= 0; v = nodes_[static_cast<std::size_t>(v)].parent)
        --nodes_[static_cast<std::size_t>(v)].live;
    if (static_cast<double>(live_count_) < config_.rebuild_fraction * static_cast<double>(order_.size()))
        rebuild(live_members());
}

std::vector<Id> PruneTree::live_members() const {
    std::vector<Id> out;
    out.reserve(live_count_);
    for (Id id : order_)
        if (alive_[id]) out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t PruneTree::node_bytes() { return sizeof(Node); }

PruneStats PruneTree::stats() const {
    PruneStats s;
    s.nodes = nodes_.size();
    for (const auto& nd : nodes_) s.buckets += nd.left < 0;
    s.depth = depth_;
    s.bucket_bytes = order_.size() * sizeof(Id);
    s.rebuilds = rebuilds_;
    return s;
}

bool PruneTree::audit() const {
    if (order_.empty()) return nodes_.empty();
    const double n = static_cast<double>(order_.size());
    const double bound =
        std::ceil(std::log2(std::max(1.0, n / static_cast<double>(config_.bucket_size)))) + 2.0;
    if (static_cast<double>(depth_) > bound) return false;
    std::size_t live = 0;
    for (Id id : order_) live += alive_[id] != 0;
    if (live != live_count_ || nodes_[0].live != live_count_) return false;
    for (const auto& nd : nodes_) {
        std::uint32_t nl = 0;
        for (std::uint32_t i = nd.begin; i < nd.end; ++i) {
            const Homothet& h = (*storage_)[order_[i]];
            if (!nd.cbox.contains(h.center) || h.size < nd.rho_lo || h.size > nd.rho_hi) return false;
            nl += alive_[order_[i]] != 0;
        }
        if (nl != nd.live) return false;
    }
    return true;
}

}  // namespace hprox
