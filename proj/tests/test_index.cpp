#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/index.hpp"
#include "hprox/oracle.hpp"
#include "hprox/verify.hpp"

using namespace hprox;

namespace {
const StructureKind kAll[] = {StructureKind::fast, StructureKind::grouped, StructureKind::linear,
                              StructureKind::oracle};
}

TEST_CASE("structure names") {
    for (auto k : kAll) CHECK(parse_structure(to_string(k)) == k);
    CHECK_THROWS_AS(parse_structure("kd"), std::invalid_argument);
}

TEST_CASE("empty index and single member") {
    for (auto k : kAll) {
        auto idx = make_index(k, ConvexBody::euclidean(), {});
        CHECK_FALSE(idx->detect({{0, 0, 0}, 5}).has_value());
        CHECK_THROWS_AS(nearest(*idx, {{0, 0, 0}, 1}), EmptySceneError);
        const Id id = idx->insert({{1, 2, 3}, 0.5});
        CHECK(id == 0);
        const Neighbor nn = nearest(*idx, {{4, 6, 3}, 0.5});
        CHECK(nn.id == 0);
        CHECK(nn.distance == doctest::Approx(4.0).epsilon(1e-12));
        idx->remove(0);
        CHECK_FALSE(idx->detect({{1, 2, 3}, 100}).has_value());
        CHECK_THROWS_AS(idx->remove(0), std::out_of_range);
    }
}

TEST_CASE("logarithmic method layer sizes") {
    auto idx = make_index(StructureKind::linear, ConvexBody::euclidean(), {});
    auto* li = dynamic_cast<LinearIndex*>(idx.get());
    REQUIRE(li != nullptr);
    CounterRng rng(1, 0);
    for (std::size_t i = 1; i <= 64; ++i) {
        idx->insert({{rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(0, 10)}, 0.5});
        const auto sizes = li->layer_sizes();
        std::size_t bits = 0;
        for (std::size_t j = 0; j < sizes.size(); ++j) {
            if (sizes[j] == 0) continue;
            CHECK(sizes[j] == (std::size_t{1} << j));
            bits |= sizes[j];
        }
        CHECK(bits == i);
        CHECK(li->audit_layers());
    }
}

TEST_CASE("nearest neighbor matches the oracle") {
    for (auto k : kAll) {
        const Scene s = test::random_scene(500, static_cast<int>(k) % 3, 12);
        auto idx = make_index(k, s);
        CounterRng rng(3, 0);
        for (int i = 0; i < 300; ++i) {
            const Homothet q = test::random_query(s, rng);
            const Neighbor want = brute_nn(s, q);
            const Neighbor got = nearest(*idx, q);
            REQUIRE(got.distance <= want.distance + 1e-8);
            REQUIRE(got == want);
        }
        // Intersecting queries return a nonpositive distance.
        CHECK(nearest(*idx, s[3]).distance <= 0.0);
    }
}

TEST_CASE("budget mapping") {
    CHECK(structure_for_budget(1000, 2000).kind == StructureKind::linear);
    CHECK(structure_for_budget(1000, 1e6).kind == StructureKind::fast);
    const auto g = structure_for_budget(1000, 1e5);
    CHECK(g.kind == StructureKind::grouped);
    CHECK(g.group_size == 10);
}

TEST_CASE("grouped index uses the requested group size") {
    const Scene s = test::random_scene(300, 0, 2);
    IndexOptions o;
    o.group_size = 50;
    auto idx = make_index(StructureKind::grouped, s, o);
    auto* gi = dynamic_cast<GroupedIndex*>(idx.get());
    REQUIRE(gi != nullptr);
    CHECK(gi->group_count() == 6);
    CHECK(idx->stats()["group_size"] == 50);
}

TEST_CASE("stats report memory and structure") {
    const Scene s = test::random_scene(400, 0, 1);
    for (auto k : kAll) {
        const auto j = make_index(k, s)->stats();
        CHECK(j["structure"] == to_string(k));
        CHECK(j["live"] == 400);
        CHECK(j.contains("nodes"));
        CHECK(j.contains("memory_bytes"));
    }
}

TEST_CASE("dynamic oracle equivalence at smoke scale") {
    DynamicOptions o;
    o.sequences = 30;
    o.length = 200;
    o.max_n = 150;
    o.seed = 4;
    const CheckResult c = check_dynamic_equivalence(o);
    INFO(c.detail);
    CHECK(c.ok);
}
