#include "hprox/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hprox/oracle.hpp"

namespace hprox {

namespace {

double pad_for(double a, double b) { return 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

void check_id(const Scene& scene, Id id, const char* what) {
    if (id >= scene.size())
        throw std::out_of_range(std::string(what) + " " + std::to_string(id) + " is not a member");
}

void check_threshold(double r0) {
    if (!(r0 >= 0.0) || !std::isfinite(r0)) throw std::invalid_argument("r0 must be finite and >= 0");
}

/// Live members of the index adjacent to u, i.e. passing `edge`, after a
/// report at a radius padded so rounding can only add candidates.
template <class Edge>
std::vector<Id> adjacent(const ProximityIndex& index, const Homothet& u, double extra, Edge edge) {
    const Homothet q{u.center, u.size + extra + pad_for(u.size, extra)};
    std::vector<Id> out;
    for (Id v : index.report(q))
        if (edge(v)) out.push_back(v);
    return out;
}

/// Hop-bounded BFS over an index holding the whole scene; stops early once
/// `target` is reached.
template <class Edge>
GraphResult bfs_core(const Scene& scene, Id source, const GraphOptions& options, double extra,
                     std::size_t max_depth, std::optional<Id> target, Edge edge) {
    const std::size_t n = scene.size();
    GraphResult res;
    res.algorithm = "bfs";
    res.source = source;
    res.parent.assign(n, -1);
    auto index = make_index(options.structure, scene, options.index);
    index->remove(source);
    res.layers.push_back({source});
    if (target && *target == source) return res;
    while (res.layers.size() <= max_depth && index->live_count() > 0) {
        std::vector<Id> next;
        for (Id u : res.layers.back()) {
            const auto found =
                adjacent(*index, scene[u], extra, [&](Id v) { return edge(u, v); });
            for (Id v : found) {
                res.parent[v] = static_cast<long>(u);
                index->remove(v);
                next.push_back(v);
            }
            if (target && !found.empty() && std::binary_search(found.begin(), found.end(), *target)) {
                std::sort(next.begin(), next.end());
                res.layers.push_back(std::move(next));
                return res;
            }
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        res.layers.push_back(std::move(next));
    }
    return res;
}

}  // namespace

GraphResult bfs(const Scene& scene, Id source, const GraphOptions& options, double r0,
                std::size_t max_depth) {
    check_id(scene, source, "bfs source");
    check_threshold(r0);
    const ConvexBody& body = scene.body();
    return bfs_core(scene, source, options, r0, max_depth, std::nullopt, [&](Id u, Id v) {
        return homothet_distance(body, scene[u], scene[v]) <= r0;
    });
}

GraphResult dfs(const Scene& scene, Id source, const GraphOptions& options, double r0) {
    check_id(scene, source, "dfs source");
    check_threshold(r0);
    const std::size_t n = scene.size();
    const ConvexBody& body = scene.body();
    GraphResult res;
    res.algorithm = "dfs";
    res.source = source;
    res.parent.assign(n, -1);
    auto index = make_index(options.structure, scene, options.index);
    auto next_neighbor = [&](Id u) -> std::optional<Id> {
        const Homothet& h = scene[u];
        const Homothet q{h.center, h.size + r0};
        if (auto w = index->detect(q))
            if (homothet_distance(body, h, scene[*w]) <= r0) return w;
        if (r0 == 0.0) return std::nullopt;  // the query is then the canonical predicate itself
        // Rounding in rho + r0 may have hidden or faked a neighbor.
        const auto adj = adjacent(*index, h, r0, [&](Id v) {
            return homothet_distance(body, h, scene[v]) <= r0;
        });
        if (adj.empty()) return std::nullopt;
        return adj.front();
    };
    std::optional<Id> root = source;
    while (root) {
        ++res.components;
        index->remove(*root);
        res.order.push_back(*root);
        std::vector<Id> stack{*root};
        while (!stack.empty()) {
            const auto w = next_neighbor(stack.back());
            if (!w) {
                stack.pop_back();
                continue;
            }
            res.parent[*w] = static_cast<long>(stack.back());
            index->remove(*w);
            res.order.push_back(*w);
            stack.push_back(*w);
        }
        root = index->first_live();
    }
    return res;
}

// ---------------------------------------------------------------------------

BcpState::BcpState(const ConvexBody& body, const std::vector<Homothet>& blue,
                   const GraphOptions& options)
    : blue_(make_index(options.structure, body, blue, options.index)) {}

void BcpState::move_to_red(Id q, const Homothet& shape, double offset) {
    blue_->remove(q);
    // Reds that cached q must look again.
    if (const auto it = cached_by_.find(q); it != cached_by_.end()) {
        for (Id p : it->second) {
            Red& r = reds_.at(p);
            r.dirty = true;
            ++r.version;
            heap_.push({r.value, p, q, r.version});  // a lower bound on the new value
        }
        cached_by_.erase(it);
    }
    Red red;
    red.shape = shape;
    red.offset = offset;
    red.value = -std::numeric_limits<double>::infinity();
    reds_.emplace(q, red);
    red_order_.push_back(q);
    heap_.push({red.value, q, q, red.version});
}

void BcpState::retire(Id p) {
    const auto it = reds_.find(p);
    if (it == reds_.end()) throw std::out_of_range("bcp: red " + std::to_string(p) + " not present");
    if (!it->second.dirty) {
        auto c = cached_by_.find(it->second.cached);
        if (c != cached_by_.end()) c->second.erase(p);
    }
    reds_.erase(it);
    red_order_.erase(std::find(red_order_.begin(), red_order_.end(), p));
}

void BcpState::refresh(Id p) {
    Red& r = reds_.at(p);
    ++recomputations_;
    const Neighbor nn = nearest(*blue_, r.shape);
    r.cached = nn.id;
    r.value = nn.distance + r.offset;
    r.dirty = false;
    ++r.version;
    cached_by_[nn.id].insert(p);
    heap_.push({r.value, p, nn.id, r.version});
}

std::optional<BcpState::Pair> BcpState::extract_min() {
    if (blue_->live_count() == 0 || reds_.empty()) return std::nullopt;
    while (!heap_.empty()) {
        const Entry e = heap_.top();
        const auto it = reds_.find(e.red);
        if (it == reds_.end() || it->second.version != e.version) {
            heap_.pop();
            continue;
        }
        if (it->second.dirty) {
            heap_.pop();
            refresh(e.red);
            continue;
        }
        return Pair{e.red, it->second.cached, it->second.value};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

GraphResult mst_prim(const Scene& scene, double r0, const GraphOptions& options) {
    check_threshold(r0);
    const std::size_t n = scene.size();
    const ConvexBody& body = scene.body();
    GraphResult res;
    res.algorithm = "mst";
    res.parent.assign(n, -1);
    if (n == 0) return res;
    BcpState bcp(body, scene.members(), options);
    while (auto start = bcp.first_blue()) {
        ++res.components;
        bcp.move_to_red(*start, scene[*start], 0.0);
        while (auto pair = bcp.extract_min()) {
            const double w = homothet_distance(body, scene[pair->red], scene[pair->blue]);
            if (w > r0) break;  // no edge leaves the component: it is complete
            res.edges.emplace_back(pair->red, pair->blue);
            res.parent[pair->blue] = static_cast<long>(pair->red);
            res.weight += std::max(0.0, w);  // overlapping members are at distance 0
            bcp.move_to_red(pair->blue, scene[pair->blue], 0.0);
        }
        const std::vector<Id> done = bcp.red_ids();
        for (Id p : done) bcp.retire(p);
    }
    return res;
}

GraphResult dijkstra(const Scene& scene, double r0, Id source, const GraphOptions& options) {
    check_id(scene, source, "dijkstra source");
    check_threshold(r0);
    const std::size_t n = scene.size();
    const ConvexBody& body = scene.body();
    GraphResult res;
    res.algorithm = "dijkstra";
    res.source = source;
    res.parent.assign(n, -1);
    res.distances.assign(n, std::numeric_limits<double>::infinity());
    // Points only: red p becomes the homothet p + (A - w(p))K, so the nearest
    // blue point minimizes dist + w(p); A exceeds every settled distance.
    std::vector<Homothet> points(n);
    for (Id i = 0; i < n; ++i) points[i] = {scene[i].center, 0.0};
    const double shift = static_cast<double>(n) * r0 + 1.0;
    BcpState bcp(body, points, options);
    res.distances[source] = 0.0;
    bcp.move_to_red(source, {points[source].center, shift}, shift);
    while (auto pair = bcp.extract_min()) {
        const double w = body.norm(points[pair->red].center - points[pair->blue].center);
        if (w > r0) {
            bcp.retire(pair->red);  // its nearest unsettled point is out of reach
            continue;
        }
        const double d = res.distances[pair->red] + w;
        res.distances[pair->blue] = d;
        res.parent[pair->blue] = static_cast<long>(pair->red);
        bcp.move_to_red(pair->blue, {points[pair->blue].center, shift - d}, shift);
    }
    return res;
}

// ---------------------------------------------------------------------------

bool rsp_decision(const Scene& scene, Id source, Id target, std::size_t k, double r,
                  const GraphOptions& options, std::vector<Id>* path) {
    check_id(scene, source, "rsp source");
    check_id(scene, target, "rsp target");
    if (k < 1) throw std::invalid_argument("rsp: k must be >= 1");
    if (path) path->clear();
    if (source == target) {
        if (path) path->push_back(source);
        return true;
    }
    if (!(r >= 0.0)) r = 0.0;
    const ConvexBody& body = scene.body();
    const GraphResult g = bfs_core(scene, source, options, 2.0 * r, k, target, [&](Id u, Id v) {
        return critical_value(body, scene[u], scene[v]) <= r;
    });
    if (g.parent[target] < 0) return false;
    if (path) {
        for (long v = static_cast<long>(target); v >= 0; v = g.parent[static_cast<Id>(v)])
            path->push_back(static_cast<Id>(v));
        std::reverse(path->begin(), path->end());
    }
    return true;
}

RspResult rsp_solve(const Scene& scene, Id source, Id target, std::size_t k,
                    const GraphOptions& options) {
    check_id(scene, source, "rsp source");
    check_id(scene, target, "rsp target");
    if (k < 1) throw std::invalid_argument("rsp: k must be >= 1");
    RspResult out;
    if (source == target) {
        out.path = {source};
        return out;
    }
    const std::vector<double> values = critical_values(scene);
    if (!rsp_decision(scene, source, target, k, values.back(), options))
        throw NoPath("no path of at most " + std::to_string(k) + " hops even at r = " +
                     std::to_string(values.back()));
    // The decision is monotone in r, so the first accepting value is found
    // by bisection over the sorted list.
    std::size_t lo = 0, hi = values.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (rsp_decision(scene, source, target, k, values[mid], options))
            hi = mid;
        else
            lo = mid + 1;
    }
    out.r_star = values[lo];
    rsp_decision(scene, source, target, k, out.r_star, options, &out.path);
    out.hops = out.path.size() - 1;
    return out;
}

}  // namespace hprox
