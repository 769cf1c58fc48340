#pragma once

// Vertical shallow cuttings of the arrangement of distance functions,
// realized as an octree of box prisms: each leaf box carries a ceiling (one
// sample function) and a conflict list that contains every member whose
// graph can dip below that ceiling somewhere over the box.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hprox/geometry.hpp"
#include "hprox/rng.hpp"

namespace hprox {

struct CuttingConfig {
    double t = 8.0;           // shallowness: target level n/t
    double beta = 4.0;        // sampling constant
    double c_conflict = 8.0;  // conflict lists are kept below c_conflict * n / t
    int max_depth = 24;       // octree refinement limit
    // Boxes shallower than level_depth are also split while the ceiling's
    // sample level at some box corner leaves [(1 - level_slack) q, 3q]; a
    // single sample function only tracks the q-th level near its box center.
    int level_depth = 4;
    double level_slack = 0.2;
    std::size_t probe_count = 10000;
    std::uint64_t seed = 1;

    void validate() const;
    std::size_t sample_size(std::size_t n) const;  // min(n, ceil(beta t log2(t+1)))
    std::size_t sample_level(std::size_t sample) const;  // min(sample, ceil(beta log2(t+1)))
};

struct Prism {
    Box3 box;
    std::optional<Id> ceiling;  // absent: unbounded ceiling (trivial cutting)
    Interval ceiling_bounds{std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()};
    std::vector<Id> conflict;  // sorted member ids
    bool flagged = false;      // refinement gave up; treat as a brute-force leaf
    int depth = 0;
};

class Cutting {
public:
    /// Tiles `domain` for the given members (ids index into `storage`).
    static Cutting build(const ConvexBody& body, std::span<const Homothet> storage,
                         std::vector<Id> members, const Box3& domain, const CuttingConfig& config);

    const std::vector<Prism>& prisms() const { return prisms_; }
    const std::vector<Id>& sample() const { return sample_; }
    std::size_t sample_level() const { return q_; }
    const Box3& domain() const { return domain_; }
    std::size_t member_count() const { return member_count_; }
    double conflict_bound() const { return conflict_bound_; }
    double build_ms() const { return build_ms_; }

    /// Prism whose (half-open) box holds x; absent outside the domain.
    std::optional<std::size_t> locate(const Vec3& x) const;
    /// Every prism whose half-open box holds x, by exhaustive scan.
    std::vector<std::size_t> locate_brute(const Vec3& x) const;
    /// Ceiling height at x for the given prism (+inf for unbounded ceilings).
    double ceiling_at(const ConvexBody& body, std::span<const Homothet> storage, std::size_t prism,
                      const Vec3& x) const;

    /// Drops a deleted member from one conflict list.
    void erase_conflict(std::size_t prism, Id id);
    /// Keeps only the ids accepted by `keep` in every conflict list.
    void filter_conflicts(const std::function<bool(Id)>& keep);

    std::size_t max_conflict() const;
    std::size_t flagged_count() const;
    std::size_t total_conflict() const;

private:
    struct OctNode {
        Box3 box;
        int first_child = -1;  // 8 consecutive children
        int prism = -1;
    };
    bool in_half_open(const Box3& b, const Vec3& x) const;

    std::vector<Prism> prisms_;
    std::vector<OctNode> nodes_;
    std::vector<Id> sample_;
    std::size_t q_ = 0;
    std::size_t member_count_ = 0;
    double conflict_bound_ = 0.0;
    Box3 domain_{};
    double build_ms_ = 0.0;
};

Cutting build_cutting(const Scene& scene, const CuttingConfig& config);

struct CuttingReport {
    std::size_t n = 0;
    double t = 0.0;
    std::size_t prism_count = 0;
    std::size_t max_conflict = 0;
    std::size_t flagged_leaves = 0;
    double window_lo = 0.0;  // n / (2t)
    double window_hi = 0.0;  // c_conflict * n / t
    std::size_t probes = 0;
    double level_window_fraction = 0.0;
    double mean_ceiling_level = 0.0;
    double wall_time_ms = 0.0;
};

/// Probes ceiling points at random domain locations and measures their
/// level in the full arrangement.
CuttingReport verify_cutting(const Scene& scene, const Cutting& cutting, const CuttingConfig& config);

// Shallow epsilon-net measurement.

enum class RangeKind { DownwardRay, Box, Prism };

/// Either the downward ray {point} x (-inf, top] or the region box x (-inf, top].
struct Range {
    RangeKind kind = RangeKind::DownwardRay;
    Vec3 point;
    Box3 box;
    double top = 0.0;
};

bool range_hits(const ConvexBody& body, const Homothet& member, const Range& range);

/// Mixed family: rays and boxes at log-uniformly spread levels, plus the
/// prisms of `cutting` if given.
std::vector<Range> make_ranges(const Scene& scene, std::size_t count, CounterRng& rng,
                               const Cutting* cutting = nullptr);

struct NetReport {
    std::size_t ranges = 0;
    double epsilon = 0.0;
    double alpha_i = 0.0;   // smallest alpha satisfying property (i) over the family
    double alpha_ii = 0.0;  // same for property (ii)
    double alpha = 0.0;     // max of the two
    std::size_t worst_range = 0;
    std::size_t attempts = 1;
};

/// Logarithms are base 2 throughout, matching the sample-size rule.
NetReport shallow_net_check(const Scene& scene, std::span<const Id> sample,
                            std::span<const Range> ranges, double epsilon);

/// ceil((constant / eps) log2(1/eps) + log2(1/delta)).
std::size_t shallow_net_sample_size(double epsilon, double delta = 1.0 / 3.0, double constant = 2.0);

/// Draws a sample and resamples (up to max_resamples extra times) while the
/// fitted alpha exceeds alpha_target.
NetReport fit_shallow_net(const Scene& scene, std::span<const Range> ranges, double epsilon,
                          double alpha_target, std::size_t max_resamples, std::uint64_t seed,
                          std::vector<Id>* sample_out = nullptr);

std::vector<Id> random_subset(std::size_t n, std::size_t k, CounterRng& rng);

/// Number of members whose bisector with K_i crosses the open segment c_i x.
std::size_t radial_level(const Scene& scene, Id i, const Vec3& x);

}  // namespace hprox
