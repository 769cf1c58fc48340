#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/linear_tree.hpp"
#include "hprox/oracle.hpp"

using namespace hprox;

namespace {
PruneTree make(const Scene& s, PruneConfig cfg = {}) {
    auto st = std::make_shared<const std::vector<Homothet>>(s.members());
    std::vector<Id> ids(s.size());
    std::iota(ids.begin(), ids.end(), Id{0});
    return PruneTree(s.body(), st, ids, cfg);
}
}  // namespace

TEST_CASE("detect and report match the oracle") {
    for (int body = 0; body < 3; ++body) {
        const Scene s = test::random_scene(2000, body, body + 1);
        PruneTree t = make(s);
        CHECK(t.audit());
        CounterRng rng(body, 0);
        for (int i = 0; i < 1000; ++i) {
            const Homothet q = test::random_query(s, rng);
            const auto want = brute_intersections(s, q);
            const auto w = t.detect(q);
            REQUIRE(w.has_value() == !want.empty());
            if (w) REQUIRE(std::binary_search(want.begin(), want.end(), *w));
            REQUIRE(t.report(q) == want);
        }
    }
}

TEST_CASE("pruned at the root and engulfing queries") {
    const Scene s = test::random_scene(500, 0, 3);
    PruneTree t = make(s);
    QueryStats qs;
    CHECK_FALSE(t.detect({{1e6, 0, 0}, 1.0}, &qs).has_value());
    CHECK(qs.nodes_visited == 1);
    CHECK(t.report({s.domain().center(), 1e6}).size() == 500);
}

TEST_CASE("deletions and tombstone rebuilds") {
    const Scene s = test::random_scene(1000, 1, 4);
    PruneTree t = make(s);
    CounterRng rng(2, 0);
    std::vector<char> alive(1000, 1);
    for (Id i = 0; i < 1000; i += 2) {
        t.remove(i);
        alive[i] = 0;
    }
    CHECK_THROWS_AS(t.remove(0), std::out_of_range);
    CHECK(t.live_count() == 500);
    for (Id i = 1; i < 700; i += 2) {
        t.remove(i);
        alive[i] = 0;
    }
    CHECK(t.stats().rebuilds >= 1);
    CHECK(t.audit());
    for (int q = 0; q < 300; ++q) {
        const Homothet h = test::random_query(s, rng);
        std::vector<Id> want;
        for (Id j : brute_intersections(s, h))
            if (alive[j]) want.push_back(j);
        REQUIRE(t.report(h) == want);
    }
}

TEST_CASE("visited nodes grow sublinearly") {
    std::vector<double> ns, visited;
    for (std::size_t n = 8; n <= 32768; n *= 4) {
        GeneratorSpec g;
        g.n = n;
        g.seed = 5;
        const Scene s = generate(g);
        PruneTree t = make(s);
        CounterRng rng(n, 0);
        QueryStats qs;
        for (int i = 0; i < 500; ++i) (void)t.detect(test::random_query(s, rng, 1.0), &qs);
        ns.push_back(static_cast<double>(n));
        visited.push_back(static_cast<double>(qs.nodes_visited) / 500.0);
    }
    // Over a 4096-fold growth in n the mean visit count grows far less.
    CHECK(visited.back() / visited.front() < 0.1 * ns.back() / ns.front());
}
