#include "hprox/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hprox/generate.hpp"
#include "hprox/graph.hpp"
#include "hprox/oracle.hpp"
#include "hprox/rng.hpp"

namespace hprox {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Minimum wall time of fn over repetitions totalling at least min_total_ms.
template <class F>
double best_of(F&& fn, double min_total_ms) {
    double best = std::numeric_limits<double>::infinity(), total = 0.0;
    do {
        const auto t0 = Clock::now();
        fn();
        const double ms = ms_since(t0);
        best = std::min(best, ms);
        total += ms;
    } while (total < min_total_ms);
    return best;
}

std::size_t memory_of(const ProximityIndex& index) {
    const auto s = index.stats();
    return s.value("memory_bytes", std::size_t{0});
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = std::min(x.size(), y.size());
    if (m < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double d = static_cast<double>(m) * sxx - sx * sx;
    return d == 0.0 ? 0.0 : (static_cast<double>(m) * sxy - sx * sy) / d;
}

nlohmann::json ScalingReport::to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows)
        rs.push_back({{"n", r.n},
                      {"structure", r.structure},
                      {"op", r.op},
                      {"count", r.count},
                      {"wall_ms", r.wall_ms},
                      {"peak_mem_bytes", r.peak_mem_bytes}});
    nlohmann::json j{{"rows", rs}, {"slope", slope}};
    j["ratio_at_max"] = ratio_at_max >= 0.0 ? nlohmann::json(ratio_at_max) : nlohmann::json(nullptr);
    return j;
}

ScalingReport run_bfs_scaling(const ScalingOptions& o) {
    ScalingReport rep;
    std::vector<double> xs, ys;
    double last_index = 0.0, last_base = -1.0;
    const std::string name = to_string(o.structure);
    for (std::size_t n : o.sizes) {
        GeneratorSpec g;
        g.n = n;
        g.target_degree = o.degree;
        g.seed = o.seed;
        const Scene scene = generate(g);
        GraphOptions opt;
        opt.structure = o.structure;

        std::size_t reached = 0;
        const double bfs_ms = best_of(
            [&] {
                const auto r = bfs(scene, 0, opt);
                reached = 0;
                for (const auto& layer : r.layers) reached += layer.size();
            },
            o.min_total_ms);
        const auto index = make_index(o.structure, scene);
        const std::size_t mem = memory_of(*index);
        rep.rows.push_back({n, name, "bfs", reached, bfs_ms, mem});
        xs.push_back(static_cast<double>(n));
        ys.push_back(bfs_ms);
        last_index = bfs_ms;

        if (n <= o.baseline_max_n) {
            std::size_t base_reached = 0;
            std::size_t edges = 0;
            const double base_ms = best_of(
                [&] {
                    const AdjacencyOracle adj(scene, 0.0);
                    const auto r = textbook_bfs(adj, 0);
                    edges = adj.edge_count();
                    base_reached = 0;
                    for (const auto& layer : r.layers) base_reached += layer.size();
                },
                o.min_total_ms);
            rep.rows.push_back({n, "oracle", "bfs", base_reached, base_ms,
                                2 * edges * sizeof(Id) + n * sizeof(std::vector<Id>)});
            last_base = base_ms;
        } else {
            last_base = -1.0;
        }
    }
    rep.slope = loglog_slope(xs, ys);
    if (last_base > 0.0) rep.ratio_at_max = last_index / last_base;
    return rep;
}

std::vector<TimingRow> run_query_bench(const Scene& scene, StructureKind kind, std::size_t queries,
                                       std::uint64_t seed, const IndexOptions& options) {
    std::vector<TimingRow> rows;
    const std::string name = to_string(kind);
    const std::size_t n = scene.size();
    auto t0 = Clock::now();
    const auto index = make_index(kind, scene, options);
    rows.push_back({n, name, "build", n, ms_since(t0), memory_of(*index)});

    CounterRng rng(seed, 0xbe7c);
    const Box3& d = scene.domain();
    double mean = 0.0;
    for (const auto& h : scene.members()) mean += h.size;
    mean /= std::max<std::size_t>(1, n);
    std::vector<Homothet> qs(queries);
    for (auto& q : qs)
        q = {{rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y), rng.uniform(d.lo.z, d.hi.z)},
             rng.uniform(0.0, 2.0 * mean)};

    std::size_t hits = 0;
    t0 = Clock::now();
    for (const auto& q : qs) hits += index->detect(q).has_value();
    rows.push_back({n, name, "detect", queries, ms_since(t0), memory_of(*index)});
    t0 = Clock::now();
    std::size_t reported = 0;
    for (const auto& q : qs) reported += index->report(q).size();
    rows.push_back({n, name, "report", queries, ms_since(t0), memory_of(*index)});
    t0 = Clock::now();
    const std::size_t nn = std::min<std::size_t>(queries, 200);
    for (std::size_t i = 0; i < nn && n > 0; ++i) (void)nearest(*index, qs[i]);
    rows.push_back({n, name, "nearest", nn, ms_since(t0), memory_of(*index)});
    (void)hits;
    (void)reported;
    return rows;
}

}  // namespace hprox
