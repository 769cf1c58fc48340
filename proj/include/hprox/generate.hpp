#pragma once

// Seed-deterministic scene generation.

#include <cstdint>
#include <string>

#include "hprox/geometry.hpp"

namespace hprox {

enum class Distribution { uniform, clustered, grid };
enum class SizeLaw { constant, uniform, pareto };

Distribution parse_distribution(const std::string& name);
SizeLaw parse_size_law(const std::string& name);

struct GeneratorSpec {
    std::size_t n = 1000;
    ConvexBody body = ConvexBody::euclidean();
    Distribution distribution = Distribution::uniform;
    SizeLaw size_law = SizeLaw::constant;
    double size = 1.0;          // constant size, pareto scale, and the size used for degree targeting
    double size_lo = 0.5;       // uniform size law
    double size_hi = 1.5;
    double pareto_alpha = 2.5;  // pareto sizes are capped at 20 * size
    /// Side of the cube the centers are drawn from; 0 derives it from
    /// target_degree for congruent members of the given size.
    double extent = 0.0;
    double target_degree = 8.0;
    std::size_t clusters = 0;    // 0 picks max(1, n / 100)
    double cluster_sigma = 0.0;  // 0 picks extent / 20
    std::uint64_t seed = 1;

    void validate() const;
};

/// Volume of the unit ball of the body.
double unit_volume(const ConvexBody& body);

/// Cube side giving expected intersection-graph degree `degree` for n
/// congruent homothets of size rho placed uniformly (ignoring the boundary).
double extent_for_degree(const ConvexBody& body, std::size_t n, double rho, double degree);

/// Throws std::invalid_argument on an invalid spec.
Scene generate(const GeneratorSpec& spec);

}  // namespace hprox
