#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/graph.hpp"
#include "hprox/oracle.hpp"
#include "hprox/verify.hpp"

using namespace hprox;

namespace {
const auto kEu = ConvexBody::euclidean();
const Scene kChain(kEu, {{{0, 0, 0}, 1}, {{2, 0, 0}, 1}, {{4, 0, 0}, 1}});
const StructureKind kKinds[] = {StructureKind::linear, StructureKind::fast, StructureKind::grouped,
                                StructureKind::oracle};
GraphOptions with(StructureKind k) {
    GraphOptions o;
    o.structure = k;
    return o;
}
}  // namespace

TEST_CASE("bfs on small scenes") {
    for (auto k : kKinds) {
        const auto g = bfs(kChain, 0, with(k));
        CHECK(g.layers == std::vector<std::vector<Id>>{{0}, {1}, {2}});
        CHECK(g.parent == std::vector<long>{-1, 0, 1});
        const Scene apart(kEu, {{{0, 0, 0}, 1}, {{10, 0, 0}, 1}});
        CHECK(bfs(apart, 1, with(k)).layers == std::vector<std::vector<Id>>{{1}});
    }
    CHECK_THROWS_AS(bfs(kChain, 7), std::out_of_range);
}

TEST_CASE("dfs on small scenes") {
    const auto g = dfs(kChain, 0);
    CHECK(g.order == std::vector<Id>{0, 1, 2});
    CHECK(g.parent == std::vector<long>{-1, 0, 1});
    const Scene edgeless(kEu, {{{0, 0, 0}, 1}, {{10, 0, 0}, 1}, {{20, 0, 0}, 1}});
    const auto f = dfs(edgeless, 1);
    CHECK(f.components == 3);
    CHECK(f.parent == std::vector<long>{-1, -1, -1});
    CHECK(f.order.front() == 1);
}

TEST_CASE("mst on small scenes") {
    const Scene pts(kEu, {{{0, 0, 0}, 0}, {{1, 0, 0}, 0}, {{2, 0, 0}, 0}});
    for (auto k : kKinds) {
        const auto m = mst_prim(pts, 1.0, with(k));
        CHECK(m.edges.size() == 2);
        CHECK(m.weight == doctest::Approx(2.0));
        const auto none = mst_prim(pts, 0.5, with(k));
        CHECK(none.edges.empty());
        CHECK(none.components == 3);
    }
    CHECK_THROWS_AS(mst_prim(pts, -1.0), std::invalid_argument);
}

TEST_CASE("dijkstra on small scenes") {
    const Scene pts(kEu, {{{0, 0, 0}, 0}, {{1, 0, 0}, 0}, {{2, 0, 0}, 0}, {{9, 0, 0}, 0}});
    for (auto k : kKinds) {
        const auto d = dijkstra(pts, 1.0, 0, with(k));
        CHECK(d.distances[0] == 0.0);
        CHECK(d.distances[1] == doctest::Approx(1.0));
        CHECK(d.distances[2] == doctest::Approx(2.0));
        CHECK(std::isinf(d.distances[3]));
    }
}

TEST_CASE("bcp extracts the brute-force minimum") {
    const Scene s = test::random_scene(200, 1, 5);
    BcpState st(s.body(), s.members(), {});
    CounterRng rng(6, 0);
    std::vector<char> red(200, 0), blue(200, 1), retired(200, 0);
    std::vector<double> offset(200, 0.0);
    auto brute = [&]() -> std::optional<double> {
        std::optional<double> best;
        for (Id p = 0; p < 200; ++p) {
            if (!red[p]) continue;
            for (Id q = 0; q < 200; ++q)
                if (blue[q]) {
                    const double v = homothet_distance(s.body(), s[p], s[q]) + offset[p];
                    if (!best || v < *best) best = v;
                }
        }
        return best;
    };
    for (int step = 0; step < 3000; ++step) {
        const double roll = rng.uniform();
        if (roll < 0.4) {
            const Id q = rng.below(200);
            if (!blue[q]) continue;
            blue[q] = 0;
            red[q] = 1;
            offset[q] = rng.uniform(0.0, 3.0);
            st.move_to_red(q, s[q], offset[q]);
        } else if (roll < 0.5) {
            const Id p = rng.below(200);
            if (!red[p]) continue;
            red[p] = 0;
            st.retire(p);
        } else {
            const auto got = st.extract_min();
            const auto want = brute();
            REQUIRE(got.has_value() == want.has_value());
            if (got) {
                REQUIRE(got->value == doctest::Approx(*want).epsilon(1e-12));
                REQUIRE(red[got->red]);
                REQUIRE(blue[got->blue]);
            }
        }
    }
}

TEST_CASE("rsp on small scenes") {
    const Scene s(kEu, {{{0, 0, 0}, 1}, {{3, 0, 0}, 1}, {{6, 0, 0}, 1}});
    for (auto k : kKinds) {
        const auto two = rsp_solve(s, 0, 2, 2, with(k));
        CHECK(two.r_star == 0.5);
        CHECK(two.path == std::vector<Id>{0, 1, 2});
        const auto one = rsp_solve(s, 0, 2, 1, with(k));
        CHECK(one.r_star == 2.0);
        CHECK(one.path == std::vector<Id>{0, 2});
        CHECK(rsp_solve(s, 1, 1, 1, with(k)).r_star == 0.0);
    }
    CHECK_FALSE(rsp_decision(s, 0, 2, 5, 0.0));
    CHECK(rsp_decision(s, 0, 2, 2, 2.0));
    CHECK_THROWS_AS(rsp_solve(s, 0, 2, 0), std::invalid_argument);
}

TEST_CASE("bfs agrees across structures") {
    const Scene s = test::random_scene(500, 2, 8, 6.0);
    const auto ref = bfs(s, 3, with(StructureKind::oracle));
    for (auto k : kKinds) {
        const auto g = bfs(s, 3, with(k));
        CHECK(g.layers == ref.layers);
        CHECK(g.parent == ref.parent);
    }
}

TEST_CASE("graph and rsp exactness suites at smoke scale") {
    const CheckResult g = check_graph_exactness(12, 200, 5);
    INFO(g.detail);
    CHECK(g.ok);
    const CheckResult r = check_rsp_exactness(8, 120, 5);
    INFO(r.detail);
    CHECK(r.ok);
}
