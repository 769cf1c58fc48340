#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/fast_tree.hpp"
#include "hprox/oracle.hpp"
#include "hprox/verify.hpp"

using namespace hprox;

namespace {

struct Built {
    Scene scene;
    std::shared_ptr<const std::vector<Homothet>> storage;
    std::unique_ptr<FastTree> tree;
};

Built build(std::size_t n, int body, std::uint64_t seed, FastConfig cfg = {}) {
    Scene s = test::random_scene(n, body, seed, 8.0);
    auto st = std::make_shared<const std::vector<Homothet>>(s.members());
    std::vector<Id> ids(n);
    std::iota(ids.begin(), ids.end(), Id{0});
    auto t = std::make_unique<FastTree>(s.body(), st, ids, cfg);
    return {std::move(s), st, std::move(t)};
}

std::vector<Id> brute_live(const Built& b, const Homothet& q) {
    std::vector<Id> out;
    for (Id i = 0; i < b.scene.size(); ++i)
        if (b.tree->live(i) && intersects(b.scene.body(), b.scene[i], q)) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("small sets are leaves") {
    auto b = build(50, 0, 1);
    CHECK(b.tree->stats().nodes == 1);
    CHECK(b.tree->stats().leaves == 1);
    CHECK(b.tree->audit().ok);
}

TEST_CASE("part count and audit at n = 1000, t = 8") {
    FastConfig cfg;
    cfg.t = 8;
    auto b = build(1000, 0, 2, cfg);
    const auto st = b.tree->stats();
    for (auto u : st.parts_per_node) CHECK(u <= 4);
    const auto a = b.tree->audit();
    INFO((a.violations.empty() ? std::string() : a.violations.front()));
    CHECK(a.ok);
}

TEST_CASE("queries match the oracle under deletions") {
    for (int body = 0; body < 3; ++body) {
        auto b = build(500, body, 10 + body);
        CounterRng rng(body, 3);
        std::vector<Id> order(500);
        std::iota(order.begin(), order.end(), Id{0});
        for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
        for (int d = 0; d < 100; ++d) b.tree->remove(order[static_cast<std::size_t>(d)]);
        for (int i = 0; i < 1000; ++i) {
            const Homothet q = test::random_query(b.scene, rng);
            const auto want = brute_live(b, q);
            const auto w = b.tree->detect(q);
            REQUIRE(w.has_value() == !want.empty());
            if (w) REQUIRE(std::binary_search(want.begin(), want.end(), *w));
            REQUIRE(b.tree->report(q) == want);
        }
        CHECK(b.tree->audit().ok);
    }
}

TEST_CASE("query equal to a member and engulfing query") {
    auto b = build(400, 1, 4);
    CHECK(b.tree->detect(b.scene[17]).has_value());
    const Homothet all{b.scene.domain().center(), 1e6};
    CHECK(b.tree->report(all).size() == 400);
    CHECK(b.tree->report({{1e7, 1e7, 1e7}, 1.0}).empty());
}

TEST_CASE("deleting everything") {
    auto b = build(300, 2, 5);
    for (Id i = 0; i < 300; ++i) b.tree->remove(i);
    CHECK(b.tree->live_count() == 0);
    CHECK_FALSE(b.tree->detect({b.scene.domain().center(), 1e6}).has_value());
    CHECK_THROWS_AS(b.tree->remove(0), std::out_of_range);
}

TEST_CASE("deleted ceiling function falls back to a live witness") {
    auto b = build(800, 0, 6);
    REQUIRE(b.tree->root_prism_count() > 0);
    int tested = 0;
    for (std::size_t pi = 0; pi < b.tree->root_prism_count() && tested < 20; ++pi) {
        const auto p = b.tree->root_prism(pi);
        if (!p || !b.tree->live(p->ceiling)) continue;
        b.tree->remove(p->ceiling);
        const Vec3 x = p->box.center();
        // A query reaching just above the deleted ceiling at x.
        const Homothet q{x, point_distance(b.scene.body(), b.scene[p->ceiling], x) + 1e-6};
        const auto want = brute_live(b, q);
        const auto w = b.tree->detect(q);
        REQUIRE(w.has_value() == !want.empty());
        if (w) CHECK(std::binary_search(want.begin(), want.end(), *w));
        CHECK(b.tree->report(q) == want);
        ++tested;
    }
    CHECK(tested > 0);
    CHECK(b.tree->audit().ok);
}

TEST_CASE("nu/(2t) deletions trigger exactly one root rebuild") {
    FastConfig cfg;
    auto b = build(600, 0, 7, cfg);
    const std::size_t chi = static_cast<std::size_t>(std::ceil(600.0 / (2.0 * cfg.t)));
    for (Id i = 0; i + 1 < chi; ++i) b.tree->remove(i);
    auto root_events = [&] {
        return std::count_if(b.tree->rebuild_log().begin(), b.tree->rebuild_log().end(),
                             [](const RebuildEvent& e) { return e.node == 0; });
    };
    CHECK(root_events() == 0);
    b.tree->remove(static_cast<Id>(chi - 1));
    CHECK(root_events() == 1);
    CHECK(b.tree->audit().ok);
}

TEST_CASE("rebuild accounting suite at smoke scale") {
    const CheckResult c = check_rebuild_accounting(4, 3);
    INFO(c.detail);
    CHECK(c.ok);
}
