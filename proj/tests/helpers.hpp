#pragma once

#include <vector>

#include "hprox/generate.hpp"
#include "hprox/geometry.hpp"
#include "hprox/rng.hpp"

namespace hprox::test {

inline ConvexBody body_of(int kind) {
    switch (kind % 3) {
        case 0: return ConvexBody::euclidean();
        case 1: return ConvexBody::ellipsoid_axes(1.0, 2.0, 4.0);
        default: return ConvexBody::superball(4, {1.0, 1.5, 0.75});
    }
}

inline Scene random_scene(std::size_t n, int body, std::uint64_t seed, double degree = 6.0,
                          SizeLaw law = SizeLaw::uniform) {
    GeneratorSpec g;
    g.n = n;
    g.body = body_of(body);
    g.size_law = law;
    g.size_lo = 0.3;
    g.size_hi = 1.5;
    g.target_degree = degree;
    g.seed = seed;
    return generate(g);
}

inline Homothet random_query(const Scene& s, CounterRng& rng, double max_size = 2.0) {
    const Box3& d = s.domain();
    return {{rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y), rng.uniform(d.lo.z, d.hi.z)},
            rng.uniform(0.0, max_size)};
}

}  // namespace hprox::test
