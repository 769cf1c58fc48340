#include "hprox/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace hprox {

namespace {
constexpr std::size_t kDenseLimit = 4096;
}

AdjacencyOracle::AdjacencyOracle(const Scene& scene, double r0)
    : n_(scene.size()), r0_(r0), adj_(n_) {
    const auto& m = scene.members();
    for (Id i = 0; i < n_; ++i)
        for (Id j = i + 1; j < n_; ++j)
            if (homothet_distance(scene.body(), m[i], m[j]) <= r0) {
                adj_[i].push_back(j);
                adj_[j].push_back(i);
            }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
    if (n_ <= kDenseLimit) {
        bits_.assign(n_ * n_, 0);
        for (Id i = 0; i < n_; ++i)
            for (Id j : adj_[i]) bits_[i * n_ + j] = 1;
    }
}

bool AdjacencyOracle::edge(Id i, Id j) const {
    if (i == j || i >= n_ || j >= n_) return false;
    if (!bits_.empty()) return bits_[i * n_ + j] != 0;
    return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
}

std::size_t AdjacencyOracle::edge_count() const {
    std::size_t deg = 0;
    for (const auto& a : adj_) deg += a.size();
    return deg / 2;
}

std::vector<Id> brute_intersections(const Scene& scene, const Homothet& query) {
    std::vector<Id> out;
    for (Id i = 0; i < scene.size(); ++i)
        if (intersects(scene.body(), scene[i], query)) out.push_back(i);
    return out;
}

Neighbor brute_nn(const Scene& scene, const Homothet& query) {
    if (scene.empty()) throw EmptySceneError("nearest neighbor of an empty scene");
    Neighbor best{0, homothet_distance(scene.body(), scene[0], query)};
    for (Id i = 1; i < scene.size(); ++i) {
        const double d = homothet_distance(scene.body(), scene[i], query);
        if (d < best.distance) best = {i, d};
    }
    return best;
}

LevelCount level_of_point(const Scene& scene, const Vec3& c, double rho) {
    LevelCount out;
    for (const auto& m : scene.members()) {
        const double f = point_distance(scene.body(), m, c);
        if (f < rho)
            ++out.below;
        else if (f == rho)
            ++out.on;
    }
    return out;
}

Id kth_nearest(const Scene& scene, const Vec3& x, std::size_t k) {
    if (k < 1 || k > scene.size()) throw std::out_of_range("kth_nearest: k out of range");
    std::vector<std::pair<double, Id>> v;
    v.reserve(scene.size());
    for (Id i = 0; i < scene.size(); ++i) v.emplace_back(point_distance(scene.body(), scene[i], x), i);
    std::nth_element(v.begin(), v.begin() + static_cast<long>(k - 1), v.end());
    return v[k - 1].second;
}

double critical_value(const ConvexBody& body, const Homothet& a, const Homothet& b) {
    return std::max(0.0, 0.5 * homothet_distance(body, a, b));
}

std::vector<double> critical_values(const Scene& scene) {
    std::vector<double> v;
    const std::size_t n = scene.size();
    v.reserve(n * (n - (n > 0)) / 2);
    for (Id i = 0; i < n; ++i)
        for (Id j = i + 1; j < n; ++j) v.push_back(critical_value(scene.body(), scene[i], scene[j]));
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (!out.empty() && x - out.back() <= 1e-12)
            out.back() = x;
        else
            out.push_back(x);
    }
    return out;
}

std::size_t count_critical_leq(const Scene& scene, double r0) {
    std::size_t count = 0;
    for (Id i = 0; i < scene.size(); ++i)
        for (Id j = i + 1; j < scene.size(); ++j)
            if (critical_value(scene.body(), scene[i], scene[j]) <= r0) ++count;
    return count;
}

BfsLayers textbook_bfs(const AdjacencyOracle& g, Id source, std::size_t max_depth) {
    const std::size_t n = g.size();
    if (source >= n) throw std::out_of_range("bfs source out of range");
    BfsLayers out;
    out.layer_of.assign(n, -1);
    out.parent.assign(n, -1);
    out.layer_of[source] = 0;
    out.layers.push_back({source});
    while (out.layers.size() <= max_depth) {
        std::vector<Id> next;
        for (Id u : out.layers.back())
            for (Id v : g.neighbors(u))
                if (out.layer_of[v] < 0) {
                    out.layer_of[v] = static_cast<long>(out.layers.size());
                    out.parent[v] = static_cast<long>(u);
                    next.push_back(v);
                }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        out.layers.push_back(std::move(next));
    }
    return out;
}

std::vector<double> textbook_dijkstra(const Scene& scene, double r0, Id source) {
    const std::size_t n = scene.size();
    if (source >= n) throw std::out_of_range("dijkstra source out of range");
    const auto& m = scene.members();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<bool> done(n, false);
    dist[source] = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
        Id u = n;
        for (Id i = 0; i < n; ++i)
            if (!done[i] && dist[i] < std::numeric_limits<double>::infinity() &&
                (u == n || dist[i] < dist[u]))
                u = i;
        if (u == n) break;
        done[u] = true;
        for (Id v = 0; v < n; ++v) {
            if (done[v]) continue;
            const double w = scene.body().norm(m[u].center - m[v].center);
            if (w <= r0 && dist[u] + w < dist[v]) dist[v] = dist[u] + w;
        }
    }
    return dist;
}

namespace {
struct DisjointSets {
    std::vector<Id> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    Id find(Id x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(Id a, Id b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};
}  // namespace

SpanningForest kruskal(const Scene& scene, double r0) {
    struct E {
        double w;
        Id a, b;
    };
    std::vector<E> edges;
    const auto& m = scene.members();
    for (Id i = 0; i < scene.size(); ++i)
        for (Id j = i + 1; j < scene.size(); ++j) {
            const double w = homothet_distance(scene.body(), m[i], m[j]);
            if (w <= r0) edges.push_back({w, i, j});
        }
    std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) {
        return std::tie(x.w, x.a, x.b) < std::tie(y.w, y.a, y.b);
    });
    DisjointSets ds(scene.size());
    SpanningForest out;
    for (const auto& e : edges)
        if (ds.unite(e.a, e.b)) {
            out.edges.emplace_back(e.a, e.b);
            out.weight += std::max(0.0, e.w);  // overlapping members are at distance 0
        }
    out.components = scene.size() - out.edges.size();
    return out;
}

bool hop_bounded_reachable(const Scene& scene, Id source, Id target, std::size_t k, double r) {
    const std::size_t n = scene.size();
    if (source >= n || target >= n) throw std::out_of_range("rsp: unknown id");
    if (source == target) return true;
    std::vector<long> depth(n, -1);
    depth[source] = 0;
    std::vector<Id> frontier{source};
    for (std::size_t d = 1; d <= k && !frontier.empty(); ++d) {
        std::vector<Id> next;
        for (Id u : frontier)
            for (Id v = 0; v < n; ++v)
                if (depth[v] < 0 && critical_value(scene.body(), scene[u], scene[v]) <= r) {
                    if (v == target) return true;
                    depth[v] = static_cast<long>(d);
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    return false;
}

std::optional<double> rsp_ascending_scan(const Scene& scene, Id source, Id target, std::size_t k) {
    const std::size_t n = scene.size();
    if (source >= n || target >= n) throw std::out_of_range("rsp: unknown id");
    if (source == target) return 0.0;
    struct Pair {
        double value;
        Id a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (Id i = 0; i < n; ++i)
        for (Id j = i + 1; j < n; ++j) pairs.push_back({critical_value(scene.body(), scene[i], scene[j]), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.value < y.value; });

    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> hops(n, kInf);
    hops[source] = 0;
    std::vector<std::vector<Id>> adj(n);
    std::vector<Id> queue;
    // Lowers hops[v] to d and propagates through the current edges.
    auto relax = [&](Id v, std::size_t d) {
        if (d >= hops[v] || d > k) return;
        hops[v] = d;
        queue.assign(1, v);
        while (!queue.empty()) {
            const Id u = queue.back();
            queue.pop_back();
            for (Id w : adj[u])
                if (hops[u] + 1 < hops[w] && hops[u] + 1 <= k) {
                    hops[w] = hops[u] + 1;
                    queue.push_back(w);
                }
        }
    };
    std::size_t next = 0;
    for (double value : critical_values(scene)) {
        for (; next < pairs.size() && pairs[next].value <= value; ++next) {
            const auto [v, a, b] = pairs[next];
            adj[a].push_back(b);
            adj[b].push_back(a);
            if (hops[a] != kInf) relax(b, hops[a] + 1);
            if (hops[b] != kInf) relax(a, hops[b] + 1);
        }
        if (hops[target] <= k) return value;
    }
    return std::nullopt;
}

}  // namespace hprox
