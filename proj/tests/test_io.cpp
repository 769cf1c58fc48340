#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/graph.hpp"
#include "hprox/index.hpp"
#include "hprox/oracle.hpp"
#include "hprox/scene_io.hpp"

using namespace hprox;
using nlohmann::json;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
std::string golden(const std::string& name) { return std::string(HPROX_GOLDEN_DIR) + "/" + name; }
std::string dumped(const json& j) { return j.dump(2) + "\n"; }
}  // namespace

TEST_CASE("scene JSON round trip is byte-identical") {
    const std::string text = slurp(golden("scene_small.json"));
    const Scene s = read_scene(golden("scene_small.json"));
    CHECK(s.size() == 12);
    CHECK(s.body().type_name() == "ellipsoid");
    CHECK(dump_scene(s) == text);
}

TEST_CASE("body specs and JSON forms") {
    for (const char* spec : {"euclidean", "ellipsoid", "ellipsoid:1,2,3", "lp", "lp:6", "lp:4:1,2,1"}) {
        const ConvexBody b = parse_body_spec(spec);
        const ConvexBody back = body_from_json(body_to_json(b));
        for (const Vec3 v : {Vec3{1, 2, 3}, Vec3{-0.5, 0.1, 4}}) CHECK(back.norm(v) == b.norm(v));
    }
    CHECK(body_from_json(json::parse(R"({"type":"ellipsoid","axes":[1,2,4]})")).norm({0, 2, 0}) ==
          doctest::Approx(1.0));
    CHECK_THROWS(parse_body_spec("cube"));
    CHECK_THROWS_AS(scene_from_json(json::parse(R"({"body":{"type":"euclidean"},"homothets":[{"c":[0,0],"rho":1}]})")),
                    SceneError);
    CHECK_THROWS_AS(scene_from_json(json::parse(R"({"body":{"type":"euclidean"},"homothets":[{"c":[0,0,0],"rho":-1}]})")),
                    SceneError);
    CHECK_THROWS_AS(scene_from_json(json::parse(R"({"homothets":[]})")), SceneError);
}

TEST_CASE("generator is deterministic") {
    GeneratorSpec g;
    g.n = 200;
    g.seed = 42;
    g.body = parse_body_spec("lp");
    CHECK(dump_scene(generate(g)) == dump_scene(generate(g)));
    g.n = 1;
    CHECK(generate(g).size() == 1);
}

TEST_CASE("generator hits the target degree") {
    GeneratorSpec g;
    g.n = 10000;
    g.seed = 3;
    const Scene s = generate(g);
    // Degree measured on a 500-member subsample against the full scene.
    double deg = 0.0;
    for (Id i = 0; i < 500; ++i)
        for (Id j = 0; j < s.size(); ++j)
            if (i != j && intersects(s.body(), s[i], s[j])) deg += 1.0;
    deg /= 500.0;
    CHECK(deg == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("golden graph results") {
    const Scene s = read_scene(golden("scene_small.json"));
    GraphOptions opt;
    CHECK(dumped(graph_result_to_json(bfs(s, 0, opt, 0.5))) == slurp(golden("bfs_small.json")));
    CHECK(dumped(graph_result_to_json(dfs(s, 0, opt, 0.5))) == slurp(golden("dfs_small.json")));
    CHECK(dumped(graph_result_to_json(mst_prim(s, 3.0, opt))) == slurp(golden("mst_small.json")));
    CHECK(dumped(graph_result_to_json(dijkstra(s, 6.0, 0, opt))) == slurp(golden("dijkstra_small.json")));

    // The golden files themselves agree with the oracle.
    const auto b = graph_result_from_json(json::parse(slurp(golden("bfs_small.json"))));
    const auto tb = textbook_bfs(AdjacencyOracle(s, 0.5), 0);
    CHECK(b.layers == tb.layers);
    CHECK(b.parent == tb.parent);
    const auto m = graph_result_from_json(json::parse(slurp(golden("mst_small.json"))));
    CHECK(m.weight == doctest::Approx(kruskal(s, 3.0).weight).epsilon(1e-12));
    const auto d = graph_result_from_json(json::parse(slurp(golden("dijkstra_small.json"))));
    const auto td = textbook_dijkstra(s, 6.0, 0);
    for (Id v = 0; v < s.size(); ++v) CHECK(d.distances[v] == doctest::Approx(td[v]).epsilon(1e-12));
    const auto r = graph_result_from_json(json::parse(slurp(golden("rsp_small.json"))));
    REQUIRE(r.r_star.has_value());
    CHECK(*r.r_star == rsp_ascending_scan(s, 0, 5, 2));
}

TEST_CASE("graph result JSON round trip") {
    const Scene s = test::random_scene(80, 1, 2, 3.0);
    for (const GraphResult& g : {bfs(s, 0), dfs(s, 1), mst_prim(s, 1.0), dijkstra(s, 5.0, 2)}) {
        const json j = graph_result_to_json(g);
        CHECK(graph_result_to_json(graph_result_from_json(j)) == j);
        CHECK(j.contains("parents"));
    }
    // Unreachable distances serialize as null.
    const Scene far(ConvexBody::euclidean(), {{{0, 0, 0}, 0}, {{100, 0, 0}, 0}});
    const json j = graph_result_to_json(dijkstra(far, 1.0, 0));
    CHECK(j["distances"][1].is_null());
}

TEST_CASE("stats schema") {
    const json schema = json::parse(slurp(golden("stats_schema.json")));
    const Scene s = test::random_scene(600, 0, 4);
    for (auto kind : {StructureKind::fast, StructureKind::grouped, StructureKind::linear, StructureKind::oracle}) {
        const std::string name = to_string(kind);
        const json st = make_index(kind, s)->stats();
        INFO(name << ": " << st.dump());
        for (const auto& key : schema["common"]) CHECK(st.contains(key.get<std::string>()));
        for (const auto& key : schema[name]) CHECK(st.contains(key.get<std::string>()));
        if (schema.contains(name + "_layer"))
            for (const auto& layer : st["layers"])
                for (const auto& key : schema[name + "_layer"]) CHECK(layer.contains(key.get<std::string>()));
    }
}

TEST_CASE("CSV headers") {
    CHECK(std::string(kCuttingCsvHeader) + "\n" == slurp(golden("cutting_header.csv")));
    CHECK(std::string(kTimingCsvHeader) + "\n" == slurp(golden("timing_header.csv")));
    CuttingReport r;
    r.n = 10;
    r.t = 4;
    const std::string crow = cutting_csv_row(r);
    CHECK(std::count(crow.begin(), crow.end(), ',') == 6);
    const std::string row = timing_csv_row({100, "linear", "bfs", 1, 2.5, 64});
    CHECK(row.rfind("100,linear,bfs,1,", 0) == 0);
    CHECK(row.substr(row.rfind(',') + 1) == "64");
}
