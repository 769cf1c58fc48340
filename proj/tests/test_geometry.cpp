#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hprox/geometry.hpp"
#include "hprox/verify.hpp"

using namespace hprox;

TEST_CASE("norms of the three body families") {
    CHECK(ConvexBody::euclidean().norm({3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(ConvexBody::superball(4).norm({1, 1, 0}) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-14));
    CHECK(ConvexBody::ellipsoid_axes(1, 2, 4).norm({0, 2, 0}) == doctest::Approx(1.0).epsilon(1e-14));
    const ConvexBody e = ConvexBody::ellipsoid({{{1, 0, 0}, {0, 0.25, 0}, {0, 0, 0.0625}}});
    CHECK(e.norm({0, 0, 4}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("point and homothet distances") {
    const auto eu = ConvexBody::euclidean();
    const Homothet k0{{0, 0, 0}, 1.0};
    CHECK(point_distance(eu, k0, k0.center) == -1.0);
    CHECK(point_distance(eu, k0, {3, 4, 0}) == doctest::Approx(4.0));
    CHECK(point_distance(ConvexBody::superball(4), {{0, 0, 0}, 0.5}, {1, 1, 0}) ==
          doctest::Approx(std::pow(2.0, 0.25) - 0.5));
    CHECK(homothet_distance(eu, {{0, 0, 0}, 1}, {{3, 0, 0}, 1}) == doctest::Approx(1.0));
    CHECK(homothet_distance(eu, k0, k0) == -2.0);
    CHECK(homothet_distance(ConvexBody::ellipsoid_axes(1, 2, 4), {{0, 0, 0}, 1}, {{0, 4, 0}, 1}) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("intersection and containment predicates") {
    const auto eu = ConvexBody::euclidean();
    CHECK_FALSE(intersects(eu, {{0, 0, 0}, 1}, {{3, 0, 0}, 1}));
    CHECK(intersects(eu, {{0, 0, 0}, 2}, {{3, 0, 0}, 1}));  // tangent
    CHECK(contains(eu, {{0, 0, 0}, 3}, {{1, 0, 0}, 1}));
    CHECK(contains(eu, {{0, 0, 0}, 1}, {{0, 0, 0}, 1}));
    CHECK_FALSE(contains(eu, {{0, 0, 0}, 1}, {{0, 0, 0}, 3}));
}

TEST_CASE("homothet distance is bitwise symmetric") {
    CounterRng rng(5, 0);
    for (int i = 0; i < 3000; ++i) {
        const ConvexBody b = random_body(i % 3, rng);
        const Homothet a{{rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-9, 9)}, rng.uniform(0, 3)};
        const Homothet c{{rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-9, 9)}, rng.uniform(0, 3)};
        REQUIRE(homothet_distance(b, a, c) == homothet_distance(b, c, a));
        REQUIRE(intersects(b, a, c) == intersects(b, c, a));
    }
}

TEST_CASE("ray bisector crossing") {
    const auto eu = ConvexBody::euclidean();
    const Homothet ki{{0, 0, 0}, 1}, kj{{4, 0, 0}, 1};
    const auto xi = ray_bisector_crossing(eu, ki, kj, {1, 0, 0});
    REQUIRE(xi.has_value());
    CHECK(xi->x == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(xi->y) < 1e-12);
    CHECK_FALSE(ray_bisector_crossing(eu, ki, kj, {-1, 0, 0}).has_value());
}

TEST_CASE("ray bisector crossing matches a dense scan") {
    CounterRng rng(11, 0);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const ConvexBody b = test::body_of(trial);
        const Homothet ki{{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(0.2, 1.5)};
        const Homothet kj{{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(0.2, 1.5)};
        if (contains(b, ki, kj) || contains(b, kj, ki)) continue;
        const Vec3 u{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double un = b.norm(u);
        BisectorOptions opt;
        opt.max_length = 20.0;
        const auto t = ray_bisector_parameter(b, ki, kj, u, opt);
        // Scan h(t) = f_j - f_i with step 1e-4 in K-length.
        double prev = point_distance(b, kj, ki.center) - point_distance(b, ki, ki.center);
        std::optional<double> scan;
        for (int s = 1; s <= 200000 && !scan; ++s) {
            const double tt = 1e-4 * s;
            const Vec3 x = ki.center + (tt / un) * u;
            const double h = point_distance(b, kj, x) - point_distance(b, ki, x);
            if (prev > 0 && h <= 0) scan = tt;
            prev = h;
        }
        REQUIRE(t.has_value() == scan.has_value());
        if (t) CHECK(std::abs(*t - *scan) <= 1.1e-4);
        ++checked;
    }
    CHECK(checked > 30);
}

TEST_CASE("box bounds") {
    CounterRng rng(3, 0);
    for (int kind = 0; kind < 3; ++kind) {
        const ConvexBody b = test::body_of(kind);
        const Homothet k{{0.5, 0.5, 0.5}, 0.7};
        CHECK(box_bounds(b, k, {{0, 0, 0}, {1, 1, 1}}).lo == doctest::Approx(-0.7));
        const Vec3 x{2, -1, 3};
        const Interval pt = box_bounds(b, k, {x, x});
        CHECK(pt.lo == doctest::Approx(point_distance(b, k, x)).epsilon(1e-9));
        CHECK(pt.hi == doctest::Approx(point_distance(b, k, x)).epsilon(1e-9));
        for (int trial = 0; trial < 50; ++trial) {
            Box3 box{{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)}, {}};
            box.hi = box.lo + Vec3{rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3)};
            const Homothet m{{rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)}, rng.uniform(0, 2)};
            const Interval iv = box_bounds(b, m, box);
            for (int s = 0; s < 1000; ++s) {
                const Vec3 p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y),
                             rng.uniform(box.lo.z, box.hi.z)};
                const double f = point_distance(b, m, p);
                REQUIRE(iv.lo <= f + 1e-9);
                REQUIRE(f <= iv.hi + 1e-9);
            }
        }
    }
}

TEST_CASE("kernel lemma suites at smoke scale") {
    for (const auto& c : check_kernel_lemmas(2000, 9)) {
        INFO(c.invariant << ": " << c.detail);
        CHECK(c.ok);
    }
}
