#include "hprox/cutting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hprox/oracle.hpp"

namespace hprox {

void CuttingConfig::validate() const {
    if (!(t >= 1.0)) throw std::invalid_argument("cutting: t must be >= 1");
    if (!(beta >= 1.0)) throw std::invalid_argument("cutting: beta must be >= 1");
    if (!(c_conflict >= 2.0)) throw std::invalid_argument("cutting: c_conflict must be >= 2");
    if (max_depth < 0) throw std::invalid_argument("cutting: max_depth must be >= 0");
    if (!(level_slack >= 0.0 && level_slack < 1.0))
        throw std::invalid_argument("cutting: level_slack must lie in [0, 1)");
}

std::size_t CuttingConfig::sample_size(std::size_t n) const {
    const double r = std::ceil(beta * t * std::log2(t + 1.0));
    return std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1.0, r)));
}

std::size_t CuttingConfig::sample_level(std::size_t sample) const {
    const double q = std::ceil(beta * std::log2(t + 1.0));
    return std::min<std::size_t>(sample, static_cast<std::size_t>(std::max(1.0, q)));
}

std::vector<Id> random_subset(std::size_t n, std::size_t k, CounterRng& rng) {
    k = std::min(k, n);
    std::vector<Id> pool(n);
    std::iota(pool.begin(), pool.end(), Id{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace {

double slack_for(double v) { return 1e-9 * (1.0 + std::abs(v)); }

struct Builder {
    const ConvexBody& body;
    std::span<const Homothet> storage;
    const CuttingConfig& config;
    std::vector<Id> sample;
    std::size_t q = 1;
    double bound = 0.0;

    std::vector<Prism> prisms;
    // Octree nodes are written through an index since the vector grows.
    struct Node {
        Box3 box;
        int first_child = -1;
        int prism = -1;
    };
    std::vector<Node> nodes;

    Id sample_ceiling(const Vec3& x) const {
        std::vector<std::pair<double, Id>> vals;
        vals.reserve(sample.size());
        for (Id s : sample) vals.emplace_back(point_distance(body, storage[s], x), s);
        std::nth_element(vals.begin(), vals.begin() + static_cast<long>(q - 1), vals.end());
        return vals[q - 1].second;
    }

    /// Whether the ceiling's sample level stays near q at every box corner.
    bool tracks_level(Id ceiling, const Box3& box) const {
        const double lo = std::ceil((1.0 - config.level_slack) * static_cast<double>(q));
        const double hi = 3.0 * static_cast<double>(q);
        for (unsigned o = 0; o < 8; ++o) {
            const Vec3 x{(o & 1u) ? box.hi.x : box.lo.x, (o & 2u) ? box.hi.y : box.lo.y,
                         (o & 4u) ? box.hi.z : box.lo.z};
            const double top = point_distance(body, storage[ceiling], x);
            std::size_t level = 0;
            for (Id s : sample) level += point_distance(body, storage[s], x) <= top;
            if (static_cast<double>(level) < lo || static_cast<double>(level) > hi) return false;
        }
        return true;
    }

    void refine(int node, int depth, const std::vector<Id>& parent_conflict,
                std::optional<Id> parent_ceiling, double parent_hi) {
        const Box3 box = nodes[static_cast<std::size_t>(node)].box;
        const Vec3 center = box.center();
        Id ceiling = sample_ceiling(center);
        Interval cb = box_bounds(body, storage[ceiling], box);
        // Keep ceilings' upper bounds nonincreasing down the octree so that
        // every child conflict list is a subset of its parent's.
        if (parent_ceiling && cb.hi > parent_hi) {
            ceiling = *parent_ceiling;
            cb = box_bounds(body, storage[ceiling], box);
        }
        const double cut = cb.hi + slack_for(cb.hi);
        const double ceil_center = point_distance(body, storage[ceiling], center);
        std::vector<Id> conflict;
        std::size_t intrinsic = 0;
        for (Id j : parent_conflict) {
            const Homothet& m = storage[j];
            if (body.distance_to_box(m.center, box) - m.size <= cut) {
                conflict.push_back(j);
                if (point_distance(body, m, center) <= ceil_center) ++intrinsic;
            }
        }
        const bool small = static_cast<double>(conflict.size()) <= bound;
        // No refinement can fix a ceiling that already sits too high at the center.
        const bool hopeless = static_cast<double>(intrinsic) > bound;
        const bool settled = small && (depth >= config.level_depth || tracks_level(ceiling, box));
        if (settled || depth >= config.max_depth || hopeless) {
            Prism p;
            p.box = box;
            p.ceiling = ceiling;
            p.ceiling_bounds = cb;
            p.conflict = std::move(conflict);
            p.flagged = !small;
            p.depth = depth;
            nodes[static_cast<std::size_t>(node)].prism = static_cast<int>(prisms.size());
            prisms.push_back(std::move(p));
            return;
        }
        const int first = static_cast<int>(nodes.size());
        nodes[static_cast<std::size_t>(node)].first_child = first;
        for (unsigned o = 0; o < 8; ++o) nodes.push_back({box.child(o), -1, -1});
        for (int o = 0; o < 8; ++o) refine(first + o, depth + 1, conflict, ceiling, cb.hi);
    }
};

}  // namespace

Cutting Cutting::build(const ConvexBody& body, std::span<const Homothet> storage,
                       std::vector<Id> members, const Box3& domain, const CuttingConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    std::sort(members.begin(), members.end());
    Cutting c;
    c.domain_ = domain;
    c.member_count_ = members.size();
    const double n = static_cast<double>(members.size());
    c.conflict_bound_ = config.c_conflict * n / config.t;

    if (n <= config.t) {
        Prism p;
        p.box = domain;
        p.conflict = members;
        c.prisms_.push_back(std::move(p));
        c.nodes_.push_back({domain, -1, 0});
    } else {
        CounterRng rng(config.seed, members.size());
        Builder b{body, storage, config, {}, 1, c.conflict_bound_, {}, {}};
        for (std::size_t pos : random_subset(members.size(), config.sample_size(members.size()), rng))
            b.sample.push_back(members[pos]);
        b.q = config.sample_level(b.sample.size());
        b.nodes.push_back({domain, -1, -1});
        b.refine(0, 0, members, std::nullopt, std::numeric_limits<double>::infinity());
        c.sample_ = std::move(b.sample);
        c.q_ = b.q;
        c.prisms_ = std::move(b.prisms);
        c.nodes_.reserve(b.nodes.size());
        for (const auto& nd : b.nodes) c.nodes_.push_back({nd.box, nd.first_child, nd.prism});
    }
    c.build_ms_ =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return c;
}

Cutting build_cutting(const Scene& scene, const CuttingConfig& config) {
    std::vector<Id> all(scene.size());
    std::iota(all.begin(), all.end(), Id{0});
    return Cutting::build(scene.body(), scene.members(), std::move(all), scene.domain(), config);
}

std::optional<std::size_t> Cutting::locate(const Vec3& x) const {
    if (nodes_.empty() || !domain_.contains(x)) return std::nullopt;
    std::size_t node = 0;
    while (nodes_[node].first_child >= 0) {
        const Vec3 mid = nodes_[node].box.center();
        unsigned octant = 0;
        for (int k = 0; k < 3; ++k)
            if (x[k] >= mid[k]) octant |= 1u << k;
        node = static_cast<std::size_t>(nodes_[node].first_child) + octant;
    }
    return static_cast<std::size_t>(nodes_[node].prism);
}

bool Cutting::in_half_open(const Box3& b, const Vec3& x) const {
    for (int k = 0; k < 3; ++k) {
        if (x[k] < b.lo[k]) return false;
        if (x[k] >= b.hi[k] && !(b.hi[k] == domain_.hi[k] && x[k] == b.hi[k])) return false;
    }
    return true;
}

std::vector<std::size_t> Cutting::locate_brute(const Vec3& x) const {
    std::vector<std::size_t> out;
    if (!domain_.contains(x)) return out;
    for (std::size_t i = 0; i < prisms_.size(); ++i)
        if (in_half_open(prisms_[i].box, x)) out.push_back(i);
    return out;
}

double Cutting::ceiling_at(const ConvexBody& body, std::span<const Homothet> storage,
                           std::size_t prism, const Vec3& x) const {
    const auto& p = prisms_.at(prism);
    if (!p.ceiling) return std::numeric_limits<double>::infinity();
    return point_distance(body, storage[*p.ceiling], x);
}

void Cutting::erase_conflict(std::size_t prism, Id id) {
    auto& c = prisms_.at(prism).conflict;
    const auto it = std::lower_bound(c.begin(), c.end(), id);
    if (it != c.end() && *it == id) c.erase(it);
}

void Cutting::filter_conflicts(const std::function<bool(Id)>& keep) {
    for (auto& p : prisms_) std::erase_if(p.conflict, [&](Id id) { return !keep(id); });
}

std::size_t Cutting::max_conflict() const {
    std::size_t m = 0;
    for (const auto& p : prisms_)
        if (!p.flagged) m = std::max(m, p.conflict.size());
    return m;
}

std::size_t Cutting::flagged_count() const {
    return static_cast<std::size_t>(
        std::count_if(prisms_.begin(), prisms_.end(), [](const Prism& p) { return p.flagged; }));
}

std::size_t Cutting::total_conflict() const {
    std::size_t s = 0;
    for (const auto& p : prisms_) s += p.conflict.size();
    return s;
}

CuttingReport verify_cutting(const Scene& scene, const Cutting& cutting, const CuttingConfig& config) {
    CuttingReport r;
    r.n = scene.size();
    r.t = config.t;
    r.prism_count = cutting.prisms().size();
    r.max_conflict = cutting.max_conflict();
    r.flagged_leaves = cutting.flagged_count();
    r.window_lo = static_cast<double>(r.n) / (2.0 * config.t);
    r.window_hi = config.c_conflict * static_cast<double>(r.n) / config.t;
    r.wall_time_ms = cutting.build_ms();
    CounterRng rng(config.seed, 0xc0ffee);
    const Box3& d = cutting.domain();
    std::size_t inside = 0;
    double level_sum = 0.0;
    for (std::size_t i = 0; i < config.probe_count; ++i) {
        const Vec3 x{rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y),
                     rng.uniform(d.lo.z, d.hi.z)};
        const auto prism = cutting.locate(x);
        if (!prism) continue;
        ++r.probes;
        if (!cutting.prisms()[*prism].ceiling) continue;
        const double rho = cutting.ceiling_at(scene.body(), scene.members(), *prism, x);
        const double level = static_cast<double>(level_of_point(scene, x, rho).below);
        level_sum += level;
        if (level >= r.window_lo && level <= r.window_hi) ++inside;
    }
    if (r.probes > 0) {
        r.level_window_fraction = static_cast<double>(inside) / static_cast<double>(r.probes);
        r.mean_ceiling_level = level_sum / static_cast<double>(r.probes);
    }
    return r;
}

bool range_hits(const ConvexBody& body, const Homothet& member, const Range& range) {
    if (range.kind == RangeKind::DownwardRay) return point_distance(body, member, range.point) <= range.top;
    return body.distance_to_box(member.center, range.box) - member.size <= range.top;
}

namespace {
// Threshold that admits exactly `level` of the sorted values.
double top_for_level(std::vector<double>& vals, std::size_t level) {
    std::sort(vals.begin(), vals.end());
    if (level == 0) return vals.front() - 1.0;
    return vals[std::min(level, vals.size()) - 1];
}
}  // namespace

std::vector<Range> make_ranges(const Scene& scene, std::size_t count, CounterRng& rng,
                               const Cutting* cutting) {
    std::vector<Range> out;
    if (scene.empty()) return out;
    const Box3& d = scene.domain();
    const double n = static_cast<double>(scene.size());
    const int kinds = cutting != nullptr && !cutting->prisms().empty() ? 3 : 2;
    std::vector<double> vals(scene.size());
    auto random_level = [&] {
        return static_cast<std::size_t>(std::floor(std::exp(rng.uniform(0.0, std::log(n + 1.0))))) - 1;
    };
    for (std::size_t i = 0; i < count; ++i) {
        Range r;
        const int kind = static_cast<int>(i % static_cast<std::size_t>(kinds));
        if (kind == 0) {
            r.kind = RangeKind::DownwardRay;
            r.point = {rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y), rng.uniform(d.lo.z, d.hi.z)};
            for (Id j = 0; j < scene.size(); ++j) vals[j] = point_distance(scene.body(), scene[j], r.point);
            r.top = top_for_level(vals, random_level());
        } else if (kind == 1) {
            r.kind = RangeKind::Box;
            const Vec3 e = d.extent();
            for (int k = 0; k < 3; ++k) {
                const double side = e[k] * rng.uniform(0.01, 0.3);
                const double lo = rng.uniform(d.lo[k], d.hi[k] - side);
                r.box.lo[k] = lo;
                r.box.hi[k] = lo + side;
            }
            for (Id j = 0; j < scene.size(); ++j)
                vals[j] = scene.body().distance_to_box(scene[j].center, r.box) - scene[j].size;
            r.top = top_for_level(vals, random_level());
        } else {
            r.kind = RangeKind::Prism;
            const auto& p = cutting->prisms()[rng.below(cutting->prisms().size())];
            r.box = p.box;
            r.top = p.ceiling ? p.ceiling_bounds.hi : std::numeric_limits<double>::infinity();
        }
        out.push_back(r);
    }
    return out;
}

NetReport shallow_net_check(const Scene& scene, std::span<const Id> sample,
                            std::span<const Range> ranges, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    NetReport rep;
    rep.ranges = ranges.size();
    rep.epsilon = epsilon;
    const double log_inv = std::log2(1.0 / epsilon);
    const double eps_n = epsilon * static_cast<double>(scene.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        double in_sample = 0.0, in_all = 0.0;
        for (Id s : sample)
            if (range_hits(scene.body(), scene[s], ranges[i])) in_sample += 1.0;
        for (const auto& m : scene.members())
            if (range_hits(scene.body(), m, ranges[i])) in_all += 1.0;
        // Tightest zeta in each implication gives the smallest admissible alpha.
        const double a1 = in_all / ((in_sample / log_inv + 1.0) * eps_n);
        const double a2 = in_sample / ((in_all / eps_n + 1.0) * log_inv);
        rep.alpha_i = std::max(rep.alpha_i, a1);
        rep.alpha_ii = std::max(rep.alpha_ii, a2);
        if (std::max(a1, a2) > rep.alpha) {
            rep.alpha = std::max(a1, a2);
            rep.worst_range = i;
        }
    }
    return rep;
}

std::size_t shallow_net_sample_size(double epsilon, double delta, double constant) {
    return static_cast<std::size_t>(
        std::ceil(constant / epsilon * std::log2(1.0 / epsilon) + std::log2(1.0 / delta)));
}

NetReport fit_shallow_net(const Scene& scene, std::span<const Range> ranges, double epsilon,
                          double alpha_target, std::size_t max_resamples, std::uint64_t seed,
                          std::vector<Id>* sample_out) {
    const std::size_t m = shallow_net_sample_size(epsilon);
    NetReport best;
    best.alpha = std::numeric_limits<double>::infinity();
    std::size_t made = 0;
    for (std::size_t attempt = 0; attempt <= max_resamples; ++attempt) {
        ++made;
        CounterRng rng(seed, 0x5a3d + attempt);
        auto sample = random_subset(scene.size(), m, rng);
        NetReport rep = shallow_net_check(scene, sample, ranges, epsilon);
        if (rep.alpha < best.alpha) {
            best = rep;
            if (sample_out) *sample_out = sample;
        }
        if (rep.alpha <= alpha_target) break;
    }
    best.attempts = made;
    return best;
}

std::size_t radial_level(const Scene& scene, Id i, const Vec3& x) {
    const Homothet& ki = scene.members().at(i);
    const double len = scene.body().norm(x - ki.center);
    if (!(len > 0.0)) return 0;
    BisectorOptions opts;
    opts.max_length = len;
    std::size_t count = 0;
    for (Id j = 0; j < scene.size(); ++j) {
        if (j == i || contains(scene.body(), scene[j], ki)) continue;
        const auto t = ray_bisector_parameter(scene.body(), ki, scene[j], x - ki.center, opts);
        if (t && *t > 0.0 && *t < len) ++count;
    }
    return count;
}

}  // namespace hprox
