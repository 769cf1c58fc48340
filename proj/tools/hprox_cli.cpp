// Command-line harness: scene generation, index builds, queries, graph
// algorithms, invariant verification and benchmarks.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hprox/bench.hpp"
#include "hprox/cutting.hpp"
#include "hprox/generate.hpp"
#include "hprox/graph.hpp"
#include "hprox/index.hpp"
#include "hprox/rng.hpp"
#include "hprox/scene_io.hpp"
#include "hprox/verify.hpp"

using namespace hprox;
using nlohmann::json;

namespace {

struct Args {
    std::string scene_path;
    std::uint64_t seed = 1;
    std::size_t n = 1000;
    std::string body = "euclidean";
    std::string structure = "linear";
    std::string distribution = "uniform";
    std::string size_law = "constant";
    double degree = 8.0;
    double t = 0.0;  // 0 keeps the structure's default
    double budget = 0.0;
    double r0 = 0.0;
    std::size_t k = 0;
    std::size_t source = 0;
    std::size_t target = 1;
    std::string sizes;
    std::string mode = "queries";
    std::string out = "-";
};

void add_common(CLI::App* app, Args& a) {
    app->add_option("--scene", a.scene_path, "Scene JSON file (generated from --n/--body/--seed if absent)");
    app->add_option("--seed", a.seed, "Random seed");
    app->add_option("--n", a.n, "Number of homothets when generating");
    app->add_option("--body", a.body, "euclidean | ellipsoid[:a,b,c] | lp[:p[:a,b,c]]");
    app->add_option("--structure", a.structure, "fast | grouped | linear | oracle (build also accepts cutting)");
    app->add_option("--t", a.t, "Shallowness parameter t");
    app->add_option("--budget", a.budget, "Storage budget s; picks the structure");
    app->add_option("--r0", a.r0, "Distance threshold r0");
    app->add_option("--k", a.k, "Hop bound (rsp) or query count (query)");
    app->add_option("--out", a.out, "Output path, - for stdout");
    app->add_option("--distribution", a.distribution, "uniform | clustered | grid");
    app->add_option("--size-law", a.size_law, "constant | uniform | pareto");
    app->add_option("--degree", a.degree, "Target expected degree when generating");
}

Scene load_scene(const Args& a) {
    if (!a.scene_path.empty()) return read_scene(a.scene_path);
    GeneratorSpec g;
    g.n = a.n;
    g.body = parse_body_spec(a.body);
    g.distribution = parse_distribution(a.distribution);
    g.size_law = parse_size_law(a.size_law);
    g.target_degree = a.degree;
    g.seed = a.seed;
    return generate(g);
}

GraphOptions graph_options(const Args& a, std::size_t n) {
    GraphOptions o;
    if (a.budget > 0.0) {
        const auto choice = structure_for_budget(n, a.budget);
        o.structure = choice.kind;
        o.index.group_size = choice.group_size;
    } else {
        o.structure = parse_structure(a.structure);
    }
    if (a.t > 0.0) o.index.fast.t = a.t;
    o.index.fast.seed = a.seed;
    return o;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoul(item));
    return out;
}

json homothet_json(const Homothet& h) { return {{"c", {h.center.x, h.center.y, h.center.z}}, {"rho", h.size}}; }

int cmd_generate(const Args& a) {
    const Scene s = load_scene(a);
    if (a.out == "-")
        std::cout << dump_scene(s);
    else
        write_scene(s, a.out);
    return 0;
}

int cmd_build(const Args& a) {
    const Scene s = load_scene(a);
    if (a.structure == "cutting") {
        CuttingConfig cc;
        if (a.t > 0.0) cc.t = a.t;
        cc.seed = a.seed;
        const Cutting cut = build_cutting(s, cc);
        const CuttingReport r = verify_cutting(s, cut, cc);
        write_csv(a.out, kCuttingCsvHeader, {cutting_csv_row(r)});
        return 0;
    }
    const GraphOptions o = graph_options(a, s.size());
    const auto t0 = std::chrono::steady_clock::now();
    const auto index = make_index(o.structure, s, o.index);
    json j = index->stats();
    j["n"] = s.size();
    j["build_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    write_json(a.out, j);
    return 0;
}

int cmd_query(const Args& a) {
    const Scene s = load_scene(a);
    const GraphOptions o = graph_options(a, s.size());
    const auto index = make_index(o.structure, s, o.index);
    CounterRng rng(a.seed, 0x9e7);
    const Box3 d = s.domain();
    json results = json::array();
    const std::size_t count = a.k > 0 ? a.k : 10;
    for (std::size_t i = 0; i < count; ++i) {
        const Homothet q{{rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y), rng.uniform(d.lo.z, d.hi.z)},
                         rng.uniform(0.0, 2.0)};
        const auto w = index->detect(q);
        json r{{"query", homothet_json(q)}, {"detect", w ? json(*w) : json(nullptr)}, {"report", index->report(q)}};
        if (s.size() > 0) {
            const Neighbor nn = nearest(*index, q);
            r["nearest"] = {{"id", nn.id}, {"distance", nn.distance}};
        }
        results.push_back(r);
    }
    write_json(a.out, {{"structure", to_string(o.structure)}, {"queries", results}});
    return 0;
}

int cmd_graph(const std::string& which, const Args& a) {
    const Scene s = load_scene(a);
    const GraphOptions o = graph_options(a, s.size());
    GraphResult g;
    if (which == "bfs")
        g = bfs(s, a.source, o, a.r0);
    else if (which == "dfs")
        g = dfs(s, a.source, o, a.r0);
    else if (which == "mst")
        g = mst_prim(s, a.r0, o);
    else if (which == "dijkstra")
        g = dijkstra(s, a.r0, a.source, o);
    else {
        g.algorithm = "rsp";
        g.source = a.source;
        try {
            const RspResult r = rsp_solve(s, a.source, a.target, a.k > 0 ? a.k : 1, o);
            g.r_star = r.r_star;
            g.path = r.path;
        } catch (const NoPath&) {
        }
    }
    write_json(a.out, graph_result_to_json(g));
    return 0;
}

int cmd_verify(const Args& a) {
    Scene s;
    try {
        s = load_scene(a);
    } catch (const std::exception& e) {
        const json err{{"status", "fail"},          {"module", "cli-harness"}, {"invariant", "scene-schema"},
                       {"seed", a.seed},            {"detail", e.what()},
                       {"repro", "verify --scene " + a.scene_path}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    const StructureKind kind = graph_options(a, s.size()).structure;
    const Checks checks = verify_scene(s, a.seed, kind);
    json all = json::array();
    const CheckResult* first_bad = nullptr;
    for (const auto& c : checks) {
        all.push_back(to_json(c));
        if (!c.ok && !first_bad) first_bad = &c;
    }
    write_json(a.out, {{"ok", first_bad == nullptr}, {"seed", a.seed}, {"checks", all}});
    if (first_bad) {
        std::string repro = first_bad->repro;
        if (!a.scene_path.empty())
            repro += " scene=" + a.scene_path;
        else
            repro += " generated with --n " + std::to_string(a.n) + " --body " + a.body + " --distribution " +
                     a.distribution + " --size-law " + a.size_law;
        const json err{{"status", "fail"},     {"module", first_bad->module}, {"invariant", first_bad->invariant},
                       {"seed", a.seed},       {"detail", first_bad->detail}, {"repro", repro}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}

int cmd_bench(const Args& a) {
    if (a.mode == "scaling") {
        ScalingOptions o;
        if (!a.sizes.empty()) o.sizes = parse_sizes(a.sizes);
        o.structure = parse_structure(a.structure);
        o.seed = a.seed;
        o.degree = a.degree;
        const ScalingReport r = run_bfs_scaling(o);
        std::vector<std::string> rows;
        for (const auto& row : r.rows) rows.push_back(timing_csv_row(row));
        write_csv(a.out, kTimingCsvHeader, rows);
        std::cerr << json{{"slope", r.slope}, {"ratio_at_max", r.ratio_at_max}}.dump() << "\n";
        return 0;
    }
    if (a.mode == "cutting") {
        std::vector<std::string> rows;
        const std::vector<double> ts = a.t > 0.0 ? std::vector<double>{a.t} : std::vector<double>{4, 8, 16};
        const Scene s = load_scene(a);
        for (double t : ts) {
            CuttingConfig cc;
            cc.t = t;
            cc.seed = a.seed;
            const auto t0 = std::chrono::steady_clock::now();
            const Cutting cut = build_cutting(s, cc);
            CuttingReport r = verify_cutting(s, cut, cc);
            r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            rows.push_back(cutting_csv_row(r));
        }
        write_csv(a.out, kCuttingCsvHeader, rows);
        return 0;
    }
    if (a.mode != "queries") throw std::invalid_argument("unknown bench mode '" + a.mode + "'");
    const Scene s = load_scene(a);
    const GraphOptions o = graph_options(a, s.size());
    std::vector<std::string> rows;
    for (const auto& row : run_query_bench(s, o.structure, a.k > 0 ? a.k : 1000, a.seed, o.index))
        rows.push_back(timing_csv_row(row));
    write_csv(a.out, kTimingCsvHeader, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proximity queries and implicit graphs on homothets of a convex body"};
    app.require_subcommand(1);
    Args a;
    std::string chosen;
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"generate", "Generate a scene JSON"},
        {"build", "Build an index and print its statistics (or a cutting CSV with --structure cutting)"},
        {"query", "Run --k random detect/report/nearest queries"},
        {"bfs", "Breadth-first layers from --source in G_{r0}"},
        {"dfs", "Depth-first forest from --source in G_{r0}"},
        {"mst", "Minimum spanning forest of G_{r0}"},
        {"dijkstra", "Center-to-center shortest paths from --source with edge cap --r0"},
        {"rsp", "Smallest r with a <= --k hop path from --source to --target"},
        {"verify", "Check every invariant on a scene; exits nonzero on a violation"},
        {"bench", "Timing benchmarks (--mode queries|scaling|cutting)"},
    };
    for (const auto& [name, help] : cmds) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, a);
        if (name == "bfs" || name == "dfs" || name == "dijkstra" || name == "rsp")
            sub->add_option("--source", a.source, "Source member id");
        if (name == "rsp") sub->add_option("--target", a.target, "Target member id");
        if (name == "bench") {
            sub->add_option("--mode", a.mode, "queries | scaling | cutting");
            sub->add_option("--sizes", a.sizes, "Comma-separated n values for scaling");
        }
        sub->callback([&chosen, n = name] { chosen = n; });
    }
    CLI11_PARSE(app, argc, argv);
    try {
        if (chosen == "generate") return cmd_generate(a);
        if (chosen == "build") return cmd_build(a);
        if (chosen == "query") return cmd_query(a);
        if (chosen == "verify") return cmd_verify(a);
        if (chosen == "bench") return cmd_bench(a);
        return cmd_graph(chosen, a);
    } catch (const std::exception& e) {
        std::cerr << json{{"status", "error"}, {"command", chosen}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    }
}
