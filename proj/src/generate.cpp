#include "hprox/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hprox/rng.hpp"

namespace hprox {

Distribution parse_distribution(const std::string& name) {
    if (name == "uniform") return Distribution::uniform;
    if (name == "clustered") return Distribution::clustered;
    if (name == "grid") return Distribution::grid;
    throw std::invalid_argument("unknown distribution '" + name + "' (uniform|clustered|grid)");
}

SizeLaw parse_size_law(const std::string& name) {
    if (name == "constant") return SizeLaw::constant;
    if (name == "uniform") return SizeLaw::uniform;
    if (name == "pareto") return SizeLaw::pareto;
    throw std::invalid_argument("unknown size law '" + name + "' (constant|uniform|pareto)");
}

void GeneratorSpec::validate() const {
    if (n < 1) throw std::invalid_argument("generator: n must be >= 1");
    if (!(size >= 0.0) || !std::isfinite(size)) throw std::invalid_argument("generator: size must be >= 0");
    if (size_law == SizeLaw::uniform && !(size_lo >= 0.0 && size_lo <= size_hi && std::isfinite(size_hi)))
        throw std::invalid_argument("generator: need 0 <= size_lo <= size_hi");
    if (size_law == SizeLaw::pareto && !(pareto_alpha > 0.0))
        throw std::invalid_argument("generator: pareto_alpha must be positive");
    if (!(extent >= 0.0) || !std::isfinite(extent)) throw std::invalid_argument("generator: extent must be >= 0");
    if (extent == 0.0 && !(target_degree > 0.0 && size > 0.0))
        throw std::invalid_argument("generator: extent 0 needs positive target_degree and size");
    if (!(cluster_sigma >= 0.0)) throw std::invalid_argument("generator: cluster_sigma must be >= 0");
}

double unit_volume(const ConvexBody& body) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            constexpr double ball = 4.0 / 3.0 * std::numbers::pi;
            if constexpr (std::is_same_v<T, ConvexBody::Euclidean>) {
                return ball;
            } else if constexpr (std::is_same_v<T, ConvexBody::Ellipsoid>) {
                const auto& q = v.q;
                const double det = q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) -
                                   q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
                                   q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
                return ball / std::sqrt(det);
            } else {
                const double p = v.p;
                const double g = std::tgamma(1.0 + 1.0 / p);
                return 8.0 * g * g * g / std::tgamma(1.0 + 3.0 / p) * v.scale[0] * v.scale[1] * v.scale[2];
            }
        },
        body.variant());
}

double extent_for_degree(const ConvexBody& body, std::size_t n, double rho, double degree) {
    // Neighbors of a member lie in the homothet of size 2 rho around it. A
    // ball of radius R near a face loses on average 3/16 of its volume per
    // face within reach, so each axis keeps a fraction 1 - 3R/(8L).
    const double reach = 2.0 * rho;
    const double v = unit_volume(body) * reach * reach * reach * static_cast<double>(n > 1 ? n - 1 : 1);
    const double r_euclid = reach * std::cbrt(unit_volume(body) / (4.0 / 3.0 * std::numbers::pi));
    double side = std::cbrt(v / degree);
    for (int it = 0; it < 50; ++it) {
        const double keep = std::max(0.05, 1.0 - 3.0 * r_euclid / (8.0 * side));
        side = std::cbrt(v * keep * keep * keep / degree);
    }
    return side;
}

Scene generate(const GeneratorSpec& spec) {
    spec.validate();
    const double side = spec.extent > 0.0 ? spec.extent
                                          : extent_for_degree(spec.body, spec.n, spec.size, spec.target_degree);
    CounterRng rng(spec.seed, 0x5ce7e);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Homothet> members(spec.n);

    switch (spec.distribution) {
        case Distribution::uniform:
            for (auto& m : members) m.center = {side * unit(rng), side * unit(rng), side * unit(rng)};
            break;
        case Distribution::clustered: {
            const std::size_t k = spec.clusters > 0 ? spec.clusters : std::max<std::size_t>(1, spec.n / 100);
            const double sigma = spec.cluster_sigma > 0.0 ? spec.cluster_sigma : side / 20.0;
            std::vector<Vec3> seeds(k);
            for (auto& s : seeds) s = {side * unit(rng), side * unit(rng), side * unit(rng)};
            std::normal_distribution<double> offset(0.0, sigma);
            for (auto& m : members) {
                const Vec3& s = seeds[rng.below(k)];
                m.center = {s.x + offset(rng), s.y + offset(rng), s.z + offset(rng)};
            }
            break;
        }
        case Distribution::grid: {
            std::size_t per_axis = 1;
            while (per_axis * per_axis * per_axis < spec.n) ++per_axis;
            const double step = side / static_cast<double>(per_axis);
            for (std::size_t i = 0; i < spec.n; ++i) {
                const std::size_t a = i % per_axis, b = (i / per_axis) % per_axis, c = i / (per_axis * per_axis);
                members[i].center = {step * (static_cast<double>(a) + 0.5), step * (static_cast<double>(b) + 0.5),
                                     step * (static_cast<double>(c) + 0.5)};
            }
            break;
        }
    }

    CounterRng size_rng(spec.seed, 0x512e);
    for (auto& m : members) {
        switch (spec.size_law) {
            case SizeLaw::constant: m.size = spec.size; break;
            case SizeLaw::uniform: m.size = spec.size_lo + (spec.size_hi - spec.size_lo) * unit(size_rng); break;
            case SizeLaw::pareto: {
                const double u = 1.0 - unit(size_rng);  // (0, 1]
                m.size = std::min(20.0 * spec.size, spec.size * std::pow(u, -1.0 / spec.pareto_alpha));
                break;
            }
        }
    }
    return Scene(spec.body, std::move(members));
}

}  // namespace hprox
