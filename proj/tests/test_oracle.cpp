#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/oracle.hpp"

using namespace hprox;

TEST_CASE("brute intersections and nearest neighbor") {
    const Scene empty(ConvexBody::euclidean(), {});
    CHECK(brute_intersections(empty, {{0, 0, 0}, 1}).empty());
    CHECK_THROWS_AS(brute_nn(empty, {{0, 0, 0}, 1}), EmptySceneError);

    const Scene one(ConvexBody::euclidean(), {{{1, 0, 0}, 0.5}});
    CHECK(brute_intersections(one, {{1, 0, 0}, 0.5}) == std::vector<Id>{0});
    const Neighbor nn = brute_nn(one, {{4, 0, 0}, 1});
    CHECK(nn.id == 0);
    CHECK(nn.distance == doctest::Approx(1.5));

    const Scene s = test::random_scene(100, 1, 4);
    CounterRng rng(1, 0);
    for (int i = 0; i < 200; ++i) {
        const Homothet q = test::random_query(s, rng);
        std::vector<Id> want;
        for (Id j = 0; j < s.size(); ++j)
            if (intersects(s.body(), s[j], q)) want.push_back(j);
        REQUIRE(brute_intersections(s, q) == want);
    }
}

TEST_CASE("levels and k-th nearest") {
    const Scene s = test::random_scene(60, 2, 8);
    CounterRng rng(2, 0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 x = test::random_query(s, rng).center;
        std::vector<std::pair<double, Id>> v;
        for (Id j = 0; j < s.size(); ++j) v.emplace_back(point_distance(s.body(), s[j], x), j);
        std::sort(v.begin(), v.end());
        CHECK(level_of_point(s, x, v.front().first - 1.0).below == 0);
        CHECK(level_of_point(s, x, 1e9).below == s.size());
        for (std::size_t k : {std::size_t{1}, std::size_t{7}, s.size()}) CHECK(kth_nearest(s, x, k) == v[k - 1].second);
        CHECK(kth_nearest(s, x, 1) == brute_nn(s, {x, 0.0}).id);
    }
}

TEST_CASE("critical values") {
    const auto eu = ConvexBody::euclidean();
    const Scene two(eu, {{{0, 0, 0}, 1}, {{5, 0, 0}, 2}});
    CHECK(critical_values(two) == std::vector<double>{1.0});
    const Scene overlap(eu, {{{0, 0, 0}, 1}, {{1, 0, 0}, 2}});
    CHECK(critical_values(overlap) == std::vector<double>{0.0});

    const Scene s = test::random_scene(50, 1, 3, 3.0);
    const auto cv = critical_values(s);
    CHECK(cv.size() <= 50 * 49 / 2);
    CHECK(std::is_sorted(cv.begin(), cv.end()));
    std::vector<double> all;
    for (Id i = 0; i < s.size(); ++i)
        for (Id j = i + 1; j < s.size(); ++j) all.push_back(critical_value(s.body(), s[i], s[j]));
    std::sort(all.begin(), all.end());
    for (double v : cv) {
        // Each deduplicated value is the largest of a cluster of pair values.
        const auto it = std::lower_bound(all.begin(), all.end(), v);
        REQUIRE(it != all.end());
        CHECK(*it == v);
    }
    CHECK(count_critical_leq(s, -1.0) == 0);
    CHECK(count_critical_leq(s, cv.back()) == all.size());
    CounterRng rng(4, 0);
    for (int i = 0; i < 30; ++i) {
        const double r = rng.uniform(0.0, cv.back());
        // Rank in the sorted multiset of pair values.
        CHECK(count_critical_leq(s, r) == static_cast<std::size_t>(std::upper_bound(all.begin(), all.end(), r) - all.begin()));
    }
}

TEST_CASE("textbook graph algorithms on small cases") {
    const auto eu = ConvexBody::euclidean();
    const Scene chain(eu, {{{0, 0, 0}, 1}, {{2, 0, 0}, 1}, {{4, 0, 0}, 1}});
    const AdjacencyOracle g(chain, 0.0);
    CHECK(g.edge(0, 1));
    CHECK(g.edge(1, 2));
    CHECK_FALSE(g.edge(0, 2));
    const auto b = textbook_bfs(g, 0);
    CHECK(b.layers == std::vector<std::vector<Id>>{{0}, {1}, {2}});

    const Scene pts(eu, {{{0, 0, 0}, 0}, {{1, 0, 0}, 0}, {{2, 0, 0}, 0}});
    const auto f = kruskal(pts, 1.0);
    CHECK(f.edges.size() == 2);
    CHECK(f.weight == doctest::Approx(2.0));
    CHECK(kruskal(pts, 0.5).components == 3);
    const auto d = textbook_dijkstra(pts, 1.0, 0);
    CHECK(d == std::vector<double>{0.0, 1.0, 2.0});

    const Scene rsp(eu, {{{0, 0, 0}, 1}, {{3, 0, 0}, 1}, {{6, 0, 0}, 1}});
    CHECK(rsp_ascending_scan(rsp, 0, 2, 2) == 0.5);
    CHECK(rsp_ascending_scan(rsp, 0, 2, 1) == 2.0);
    CHECK(hop_bounded_reachable(rsp, 0, 2, 2, 0.5));
    CHECK_FALSE(hop_bounded_reachable(rsp, 0, 2, 1, 0.5));
}

TEST_CASE("sparse adjacency matches the dense one") {
    const Scene s = test::random_scene(300, 0, 6);
    const AdjacencyOracle g(s, 0.2);
    for (Id i = 0; i < s.size(); ++i)
        for (Id j = 0; j < s.size(); ++j)
            REQUIRE(g.edge(i, j) == (i != j && homothet_distance(s.body(), s[i], s[j]) <= 0.2));
}
