#include "hprox/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hprox/generate.hpp"
#include "hprox/graph.hpp"
#include "hprox/oracle.hpp"

namespace hprox {

using nlohmann::json;

json to_json(const CheckResult& c) {
    return {{"module", c.module},   {"invariant", c.invariant}, {"ok", c.ok},          {"detail", c.detail},
            {"repro", c.repro},     {"seconds", c.seconds},     {"metrics", c.metrics}};
}

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Records the first failure only; later ones just bump the counter.
struct Failures {
    std::size_t count = 0;
    std::string first;
    void add(const std::string& what) {
        if (count++ == 0) first = what;
    }
};

CheckResult make_check(std::string module, std::string invariant, const Failures& f, std::string detail,
                       std::string repro, const Stopwatch& sw) {
    CheckResult c;
    c.module = std::move(module);
    c.invariant = std::move(invariant);
    c.ok = f.count == 0;
    c.detail = f.count == 0 ? std::move(detail)
                            : std::to_string(f.count) + " counterexample(s); first: " + f.first;
    c.repro = std::move(repro);
    c.seconds = sw.seconds();
    c.metrics["counterexamples"] = f.count;
    return c;
}

template <class... Args>
std::string cat(const Args&... args) {
    std::ostringstream s;
    s.precision(12);
    (s << ... << args);
    return s.str();
}

Vec3 random_vec(CounterRng& rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

Vec3 random_direction(CounterRng& rng) {
    for (;;) {
        const Vec3 v = random_vec(rng, -1.0, 1.0);
        const double l2 = v.x * v.x + v.y * v.y + v.z * v.z;
        if (l2 > 1e-4 && l2 <= 1.0) return v;
    }
}

Homothet random_homothet(CounterRng& rng) { return {random_vec(rng, -5.0, 5.0), rng.uniform(0.0, 3.0)}; }

double tol_of(double scale) { return 1e-12 * (1.0 + std::abs(scale)); }

/// Rank of member i at x among all members, 1-based, ties by id.
std::size_t rank_at(const Scene& scene, Id i, const Vec3& x) {
    const double fi = point_distance(scene.body(), scene[i], x);
    std::size_t rank = 1;
    for (Id j = 0; j < scene.size(); ++j) {
        if (j == i) continue;
        const double fj = point_distance(scene.body(), scene[j], x);
        if (fj < fi || (fj == fi && j < i)) ++rank;
    }
    return rank;
}

std::string body_name(const ConvexBody& b) { return b.type_name(); }

// Individual lemma checks on one pair; they return a description of the
// counterexample or an empty string.

std::string single_crossing_case(const ConvexBody& body, const Homothet& ki, const Homothet& kj,
                                 const Vec3& u) {
    const double span = body.norm(kj.center - ki.center) + ki.size + kj.size + 1.0;
    const double unit = body.norm(u);
    const double len = 4.0 * span;  // parameter range in K-length
    constexpr int steps = 256;
    int changes = 0;
    int prev_sign = 0;
    int change_step = -1;
    for (int s = 0; s <= steps; ++s) {
        const double t = len * s / steps;
        const Vec3 x = ki.center + (t / unit) * u;
        const double h = point_distance(body, kj, x) - point_distance(body, ki, x);
        const int sign = h > tol_of(span) ? 1 : (h < -tol_of(span) ? -1 : 0);
        if (sign != 0) {
            if (prev_sign != 0 && sign != prev_sign) {
                ++changes;
                change_step = s;
            }
            prev_sign = sign;
        }
    }
    if (changes > 1) return cat(changes, " sign changes along the ray");
    BisectorOptions opts;
    opts.max_length = len;
    const auto t = ray_bisector_parameter(body, ki, kj, u, opts);
    if (changes == 1) {
        if (!t) return "scan found a crossing the bisection missed";
        const double lo = len * (change_step - 1) / steps, hi = len * change_step / steps;
        if (*t < lo - 1e-6 || *t > hi + 1e-6) return cat("crossing ", *t, " outside scan bracket");
    }
    return {};
}

std::string containment_case(const ConvexBody& body, const Homothet& ki, const Homothet& kj, CounterRng& rng) {
    const double scale = body.norm(ki.center - kj.center) + ki.size + kj.size;
    const double tol = 1e-9 * (1.0 + scale);
    if (contains(body, kj, ki)) {
        for (int s = 0; s < 16; ++s) {
            const Vec3 v = random_direction(rng);
            const Vec3 p = ki.center + (ki.size / body.norm(v)) * v;
            if (point_distance(body, kj, p) > tol) return "boundary point of K_i outside K_j";
        }
        return {};
    }
    // The point of K_i farthest from c_j along the center line leaves K_j.
    Vec3 d = ki.center - kj.center;
    if (body.norm(d) == 0.0) d = {1.0, 0.0, 0.0};
    const Vec3 w = ki.center + (ki.size / body.norm(d)) * d;
    if (point_distance(body, kj, w) < -tol) return "contains() false but no point of K_i leaves K_j";
    return {};
}

std::string domination_case(const ConvexBody& body, const Homothet& ki, const Homothet& kj) {
    if (contains(body, kj, ki) || contains(body, ki, kj)) return {};
    const double fi = point_distance(body, ki, ki.center);
    const double fj = point_distance(body, kj, ki.center);
    if (!(fi < fj + tol_of(fj))) return cat("f_i(c_i) = ", fi, " >= f_j(c_i) = ", fj);
    return {};
}

Homothet near_containment(const Homothet& ki, const ConvexBody& body, CounterRng& rng) {
    // Put K_j's size near the containment threshold dist + rho_i.
    Homothet kj{ki.center + random_vec(rng, -2.0, 2.0), 0.0};
    const double d = body.norm(kj.center - ki.center);
    kj.size = std::max(0.0, d + ki.size + rng.uniform(-0.5, 0.5));
    return kj;
}

/// Validity of a DFS forest: every vertex once, tree edges are graph edges,
/// and every graph edge joins an ancestor and a descendant.
std::string dfs_violation(const GraphResult& g, const AdjacencyOracle& orc) {
    const std::size_t n = orc.size();
    if (g.order.size() != n) return cat("discovered ", g.order.size(), " of ", n, " vertices");
    std::vector<long> pos(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        if (g.order[k] >= n || pos[g.order[k]] >= 0) return "discovery order repeats a vertex";
        pos[g.order[k]] = static_cast<long>(k);
    }
    std::vector<std::vector<Id>> children(n);
    std::size_t roots = 0;
    for (Id v : g.order) {
        const long p = g.parent[v];
        if (p < 0) {
            ++roots;
            continue;
        }
        if (!orc.edge(static_cast<Id>(p), v)) return cat("tree edge ", p, "-", v, " is not a graph edge");
        if (pos[static_cast<Id>(p)] > pos[v]) return cat("parent ", p, " discovered after ", v);
        children[static_cast<Id>(p)].push_back(v);
    }
    if (roots != g.components) return "component count differs from the number of roots";
    std::vector<std::size_t> pre(n), post(n);
    std::size_t clock = 0;
    for (Id r : g.order) {
        if (g.parent[r] >= 0) continue;
        std::vector<std::pair<Id, std::size_t>> stack{{r, 0}};
        pre[r] = clock++;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < children[v].size()) {
                const Id c = children[v][next++];
                pre[c] = clock++;
                stack.emplace_back(c, 0);
            } else {
                post[v] = clock++;
                stack.pop_back();
            }
        }
    }
    auto ancestor = [&](Id a, Id b) { return pre[a] <= pre[b] && post[b] <= post[a]; };
    for (Id u = 0; u < n; ++u)
        for (Id v : orc.neighbors(u))
            if (u < v && !ancestor(u, v) && !ancestor(v, u))
                return cat("graph edge ", u, "-", v, " joins unrelated subtrees");
    return {};
}

std::string rsp_path_violation(const Scene& scene, const RspResult& r, Id s, Id t, std::size_t k) {
    if (r.path.empty() || r.path.front() != s || r.path.back() != t) return "path endpoints wrong";
    if (r.hops != r.path.size() - 1 || r.hops > k) return "hop count exceeds k";
    for (std::size_t i = 0; i + 1 < r.path.size(); ++i)
        if (critical_value(scene.body(), scene[r.path[i]], scene[r.path[i + 1]]) > r.r_star)
            return "path edge above r*";
    return {};
}

std::string structure_list(const std::vector<StructureKind>& v) {
    std::string s;
    for (auto k : v) s += (s.empty() ? "" : ",") + to_string(k);
    return s;
}

/// Uniform-size scene for the randomized suites.
Scene random_scene(std::size_t n, const ConvexBody& body, CounterRng& rng, double degree) {
    GeneratorSpec g;
    g.n = n;
    g.body = body;
    g.distribution = static_cast<Distribution>(rng.below(3));
    g.size_law = SizeLaw::uniform;
    g.size = 1.0;
    g.size_lo = 0.2;
    g.size_hi = 1.6;
    g.target_degree = degree;
    g.seed = rng();
    return generate(g);
}

}  // namespace

ConvexBody random_body(int kind, CounterRng& rng) {
    switch (kind % 3) {
        case 0: return ConvexBody::euclidean();
        case 1: {
            // R diag(1/a^2) R^T with R from Gram-Schmidt on random vectors.
            Vec3 e[3];
            for (int k = 0; k < 3; ++k) {
                Vec3 v = random_direction(rng);
                for (int m = 0; m < k; ++m) {
                    const double d = v.x * e[m].x + v.y * e[m].y + v.z * e[m].z;
                    v = v - d * e[m];
                }
                const double l = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
                e[k] = (1.0 / l) * v;
            }
            const double ax[3] = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
            Mat3 q{};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) {
                    double s = 0.0;
                    for (int k = 0; k < 3; ++k) s += e[k][r] * e[k][c] / (ax[k] * ax[k]);
                    q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = s;
                }
            for (int r = 0; r < 3; ++r)
                for (int c = r + 1; c < 3; ++c)
                    q[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] =
                        q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            return ConvexBody::ellipsoid(q);
        }
        default: {
            const int p = 2 * (1 + static_cast<int>(rng.below(3)));
            return ConvexBody::superball(p, {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)});
        }
    }
}

// ---------------------------------------------------------------------------

Checks check_kernel_lemmas(std::size_t trials, std::uint64_t seed) {
    Checks out;
    const std::string repro = cat("suite=lemmas trials=", trials, " seed=", seed);

    {  // Norm axioms.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 1);
        const std::size_t count = std::max<std::size_t>(1, trials / 10);
        for (std::size_t i = 0; i < count; ++i) {
            const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
            const Vec3 v = random_vec(rng, -3.0, 3.0);
            const double s = rng.uniform(0.0, 10.0);
            const double nv = body.norm(v);
            if (body.norm({0, 0, 0}) != 0.0) f.add("norm(0) != 0");
            if (!(nv > 0.0)) f.add(cat("norm of nonzero vector not positive, trial ", i));
            if (std::abs(body.norm(s * v) - s * nv) > 1e-12 * std::max(1.0, s * nv))
                f.add(cat("homogeneity fails, trial ", i, " body ", body_name(body)));
            if (body.norm(-v) != nv) f.add(cat("symmetry fails, trial ", i));
            Vec3 a = random_direction(rng), b = random_direction(rng);
            a = (1.0 / body.norm(a)) * a;
            b = (1.0 / body.norm(b)) * b;
            const Vec3 d = a - b, e = a + b;
            if (d.x * d.x + d.y * d.y + d.z * d.z > 1e-4 && e.x * e.x + e.y * e.y + e.z * e.z > 1e-4 &&
                !(body.norm(0.5 * (a + b)) < 1.0 - 1e-12))
                f.add(cat("strict convexity fails, trial ", i, " body ", body_name(body)));
        }
        out.push_back(make_check("geometry-kernel", "norm-axioms", f, cat(count, " trials"), repro, sw));
    }
    {  // Triangle inequality.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 2);
        for (std::size_t i = 0; i < trials; ++i) {
            const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
            const Vec3 u = random_vec(rng, -5, 5), v = random_vec(rng, -5, 5), w = random_vec(rng, -5, 5);
            if (body.norm(w - u) > body.norm(v - u) + body.norm(w - v) + 1e-9)
                f.add(cat("trial ", i, " body ", body_name(body)));
        }
        out.push_back(make_check("geometry-kernel", "triangle-inequality", f, cat(trials, " trials"), repro, sw));
    }
    {  // Single crossing per ray.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 3);
        std::size_t done = 0;
        while (done < trials) {
            const ConvexBody body = random_body(static_cast<int>(done % 3), rng);
            const Homothet ki = random_homothet(rng);
            const Homothet kj = rng.below(2) ? random_homothet(rng) : near_containment(ki, body, rng);
            if (contains(body, kj, ki) || contains(body, ki, kj)) continue;
            const Vec3 u = random_direction(rng);
            if (auto bad = single_crossing_case(body, ki, kj, u); !bad.empty())
                f.add(cat("trial ", done, " body ", body_name(body), ": ", bad));
            ++done;
        }
        out.push_back(make_check("geometry-kernel", "single-crossing", f,
                                 cat(trials, " non-nested (K_i, K_j, u) triples, 256-step scans"), repro, sw));
    }
    {  // Containment criterion.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 4);
        std::size_t positive = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
            const Homothet ki = random_homothet(rng);
            const Homothet kj = rng.below(2) ? random_homothet(rng) : near_containment(ki, body, rng);
            positive += contains(body, kj, ki);
            if (auto bad = containment_case(body, ki, kj, rng); !bad.empty())
                f.add(cat("trial ", i, " body ", body_name(body), ": ", bad));
        }
        out.push_back(make_check("geometry-kernel", "containment-criterion", f,
                                 cat(trials, " pairs, ", positive, " nested"), repro, sw));
    }
    {  // Center domination.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 5);
        std::size_t done = 0;
        while (done < trials) {
            const ConvexBody body = random_body(static_cast<int>(done % 3), rng);
            const Homothet ki = random_homothet(rng);
            const Homothet kj = rng.below(2) ? random_homothet(rng) : near_containment(ki, body, rng);
            if (contains(body, kj, ki) || contains(body, ki, kj)) continue;
            if (auto bad = domination_case(body, ki, kj); !bad.empty())
                f.add(cat("trial ", done, " body ", body_name(body), ": ", bad));
            ++done;
        }
        out.push_back(make_check("geometry-kernel", "center-domination", f, cat(trials, " non-nested pairs"),
                                 repro, sw));
    }
    {  // Star-shapedness: the rank of K_i is monotone along rays from c_i.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 6);
        const std::size_t count = std::max<std::size_t>(1, trials / 100);
        for (std::size_t i = 0; i < count; ++i) {
            const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
            std::vector<Homothet> m(12);
            for (auto& h : m) h = random_homothet(rng);
            const Scene scene(body, m);
            const Id who = rng.below(m.size());
            const Vec3 u = random_direction(rng);
            std::size_t prev = 0;
            for (int s = 0; s <= 100; ++s) {
                const std::size_t r = rank_at(scene, who, m[who].center + (0.3 * s) * u);
                if (r < prev) {
                    f.add(cat("trial ", i, ": rank drops from ", prev, " to ", r));
                    break;
                }
                prev = r;
            }
        }
        out.push_back(make_check("geometry-kernel", "star-shapedness", f,
                                 cat(count, " rays, 101 samples each; every k-th-nearest set is an interval"),
                                 repro, sw));
    }
    {  // Radial level bound.
        Stopwatch sw;
        Failures f;
        CounterRng rng(seed, 7);
        const std::size_t count = std::max<std::size_t>(1, trials / 100);
        for (std::size_t i = 0; i < count; ++i) {
            const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
            std::vector<Homothet> m(15);
            for (auto& h : m) h = random_homothet(rng);
            const Scene scene(body, m);
            const Id who = rng.below(m.size());
            const Vec3 x = random_vec(rng, -6, 6);
            const std::size_t rank = rank_at(scene, who, x);
            const std::size_t level = radial_level(scene, who, x);
            if (level > rank - 1) f.add(cat("trial ", i, ": radial level ", level, " for rank ", rank));
        }
        out.push_back(make_check("shallow-cutting", "radial-level-bound", f, cat(count, " probes"), repro, sw));
    }
    return out;
}

// ---------------------------------------------------------------------------

CheckResult check_dynamic_equivalence(const DynamicOptions& o) {
    Stopwatch sw;
    Failures f;
    const std::string repro = cat("suite=dynamic sequences=", o.sequences, " length=", o.length, " max_n=", o.max_n,
                                  " structures=", structure_list(o.structures), " seed=", o.seed);
    std::size_t ops = 0, nn_queries = 0;
    double worst_nn = 0.0;
    for (std::size_t seq = 0; seq < o.sequences; ++seq) {
        CounterRng setup(o.seed, seq);
        const ConvexBody body = random_body(static_cast<int>(seq % 3), setup);
        const std::size_t n0 = 1 + setup.below(o.max_n);
        const Scene scene = random_scene(n0, body, setup, 6.0);
        const Box3 dom = scene.domain();
        const std::uint64_t op_seed = setup();
        for (StructureKind kind : o.structures) {
            const std::string where = cat("sequence ", seq, " structure ", to_string(kind), " body ",
                                          body.type_name(), " n0 ", n0);
            auto index = make_index(kind, scene);
            std::vector<Homothet> store = scene.members();
            std::vector<char> alive(store.size(), 1);
            std::vector<Id> live_ids(store.size());
            std::iota(live_ids.begin(), live_ids.end(), Id{0});
            CounterRng rng(op_seed, 77);
            auto random_query = [&]() -> Homothet {
                const double kind_roll = rng.uniform();
                const double s = rng.below(8) == 0 ? 0.0 : rng.uniform(0.0, 1.5);
                if (kind_roll < 0.15 && !live_ids.empty()) {
                    const Homothet& m = store[live_ids[rng.below(live_ids.size())]];
                    return {m.center, s};
                }
                if (kind_roll < 0.3 && !live_ids.empty()) {
                    // Near-tangent query.
                    const Homothet& m = store[live_ids[rng.below(live_ids.size())]];
                    const Vec3 u = random_direction(rng);
                    return {m.center + ((m.size + s) / body.norm(u)) * u, s};
                }
                return {{rng.uniform(dom.lo.x, dom.hi.x), rng.uniform(dom.lo.y, dom.hi.y),
                         rng.uniform(dom.lo.z, dom.hi.z)},
                        s};
            };
            auto brute = [&](const Homothet& q) {
                std::vector<Id> r;
                for (Id id = 0; id < store.size(); ++id)
                    if (alive[id] && intersects(body, store[id], q)) r.push_back(id);
                return r;
            };
            for (std::size_t step = 0; step < o.length && f.count == 0; ++step) {
                ++ops;
                const double roll = rng.uniform();
                const std::string at = cat(where, " op ", step);
                if (roll < 0.15) {
                    if (live_ids.size() >= o.max_n) continue;
                    const Homothet h{{rng.uniform(dom.lo.x, dom.hi.x), rng.uniform(dom.lo.y, dom.hi.y),
                                      rng.uniform(dom.lo.z, dom.hi.z)},
                                     rng.uniform(0.2, 1.6)};
                    const Id id = index->insert(h);
                    if (id != store.size()) f.add(at + ": insert returned an unexpected id");
                    store.push_back(h);
                    alive.push_back(1);
                    live_ids.push_back(id);
                } else if (roll < 0.35) {
                    if (live_ids.empty()) continue;
                    const std::size_t k = rng.below(live_ids.size());
                    const Id id = live_ids[k];
                    live_ids[k] = live_ids.back();
                    live_ids.pop_back();
                    alive[id] = 0;
                    index->remove(id);
                } else if (roll < 0.55) {
                    const Homothet q = random_query();
                    const auto truth = brute(q);
                    const auto w = index->detect(q);
                    if (w.has_value() != !truth.empty())
                        f.add(at + ": detect presence differs from the oracle");
                    else if (w && (!alive[*w] || !intersects(body, store[*w], q)))
                        f.add(at + ": detect returned an invalid witness");
                } else if (roll < 0.75) {
                    const Homothet q = random_query();
                    if (index->report(q) != brute(q)) f.add(at + ": report differs from the oracle");
                } else {
                    const Homothet q = random_query();
                    if (live_ids.empty()) {
                        bool threw = false;
                        try {
                            (void)nearest(*index, q);
                        } catch (const EmptySceneError&) {
                            threw = true;
                        }
                        if (!threw) f.add(at + ": nearest on an empty index did not throw");
                        continue;
                    }
                    double best = std::numeric_limits<double>::infinity();
                    for (Id id : live_ids) best = std::min(best, homothet_distance(body, store[id], q));
                    const Neighbor nn = nearest(*index, q);
                    ++nn_queries;
                    const double err = std::abs(nn.distance - best);
                    worst_nn = std::max(worst_nn, err);
                    if (!alive[nn.id] || err > 1e-8 || homothet_distance(body, store[nn.id], q) != nn.distance)
                        f.add(cat(at, ": nearest distance ", nn.distance, " vs oracle ", best));
                }
            }
            if (index->live_count() != live_ids.size()) f.add(where + ": live count differs");
            if (auto* fi = dynamic_cast<FastIndex*>(index.get())) {
                if (!fi->audit_layers()) f.add(where + ": layer audit failed");
                for (std::size_t j = 0; j < fi->layer_count(); ++j)
                    if (fi->layer(j) && !fi->layer(j)->audit().ok)
                        f.add(where + ": fast tree audit failed: " + fi->layer(j)->audit().violations.front());
            }
            if (auto* li = dynamic_cast<LinearIndex*>(index.get())) {
                if (!li->audit_layers()) f.add(where + ": layer audit failed");
                for (std::size_t j = 0; j < li->layer_count(); ++j)
                    if (li->layer(j) && !li->layer(j)->audit()) f.add(where + ": prune tree audit failed");
            }
            if (f.count) break;
        }
        if (f.count) break;
    }
    CheckResult c = make_check("proximity-index", "dynamic-oracle-equivalence", f,
                               cat(o.sequences, " sequences x ", o.structures.size(), " structures, ", ops,
                                   " operations, ", nn_queries, " NN queries, worst NN error ", worst_nn),
                               repro, sw);
    c.metrics["operations"] = ops;
    c.metrics["nn_queries"] = nn_queries;
    c.metrics["worst_nn_error"] = worst_nn;
    return c;
}

// ---------------------------------------------------------------------------

CheckResult check_cutting_contract(std::size_t n, double t, std::uint64_t seed, CuttingReport* report) {
    Stopwatch sw;
    Failures f;
    GeneratorSpec g;
    g.n = n;
    g.seed = seed;
    const Scene scene = generate(g);
    CuttingConfig cc;
    cc.t = t;
    cc.seed = seed;
    const Cutting cutting = build_cutting(scene, cc);
    const CuttingReport r = verify_cutting(scene, cutting, cc);
    if (report) *report = r;
    const double bound = cc.c_conflict * static_cast<double>(n) / t;
    const double flagged_fraction =
        r.prism_count ? static_cast<double>(r.flagged_leaves) / static_cast<double>(r.prism_count) : 0.0;
    if (static_cast<double>(r.max_conflict) > bound) f.add(cat("max conflict ", r.max_conflict, " > ", bound));
    if (r.level_window_fraction < 0.95) f.add(cat("level-window fraction ", r.level_window_fraction, " < 0.95"));
    if (flagged_fraction > 0.01) f.add(cat("flagged fraction ", flagged_fraction, " > 0.01"));
    if (sw.seconds() > 120.0) f.add(cat("took ", sw.seconds(), " s > 120 s"));
    CheckResult c = make_check(
        "shallow-cutting", cat("cutting-contract t=", t), f,
        cat("prisms ", r.prism_count, ", max conflict ", r.max_conflict, " <= ", bound, ", window fraction ",
            r.level_window_fraction, ", flagged ", r.flagged_leaves, ", mean ceiling level ", r.mean_ceiling_level),
        cat("suite=cutting n=", n, " t=", t, " seed=", seed), sw);
    c.metrics = {{"n", n},
                 {"t", t},
                 {"prism_count", r.prism_count},
                 {"max_conflict", r.max_conflict},
                 {"flagged_leaves", r.flagged_leaves},
                 {"level_window_fraction", r.level_window_fraction},
                 {"mean_ceiling_level", r.mean_ceiling_level},
                 {"wall_time_ms", r.wall_time_ms}};
    return c;
}

CheckResult check_shallow_net(std::size_t n, double epsilon, std::size_t ranges, std::uint64_t seed,
                              NetReport* report) {
    Stopwatch sw;
    Failures f;
    GeneratorSpec g;
    g.n = n;
    g.seed = seed;
    const Scene scene = generate(g);
    CuttingConfig cc;
    cc.t = 1.0 / epsilon;
    cc.seed = seed;
    const Cutting cutting = build_cutting(scene, cc);
    CounterRng rng(seed, 0x4a9e);
    const auto family = make_ranges(scene, ranges, rng, &cutting);
    const NetReport r = fit_shallow_net(scene, family, epsilon, 4.0, 3, seed);
    if (report) *report = r;
    if (r.alpha > 4.0) f.add(cat("fitted alpha ", r.alpha, " > 4 after ", r.attempts, " attempts"));
    if (r.attempts > 4) f.add(cat(r.attempts, " attempts > 1 + 3 resamples"));
    CheckResult c = make_check("shallow-cutting", "shallow-net", f,
                               cat("sample ", shallow_net_sample_size(epsilon), ", ranges ", r.ranges, ", alpha_i ",
                                   r.alpha_i, ", alpha_ii ", r.alpha_ii, ", attempts ", r.attempts),
                               cat("suite=net n=", n, " eps=", epsilon, " ranges=", ranges, " seed=", seed), sw);
    c.metrics = {{"alpha", r.alpha}, {"alpha_i", r.alpha_i}, {"alpha_ii", r.alpha_ii}, {"attempts", r.attempts}};
    return c;
}

// ---------------------------------------------------------------------------

namespace {

/// Graph checks on one scene; appends failures to f.
void graph_checks_on(const Scene& scene, StructureKind kind, CounterRng& rng, Failures& f, const std::string& where,
                     std::size_t rsp_trials) {
    const std::size_t n = scene.size();
    const ConvexBody& body = scene.body();
    GraphOptions opt;
    opt.structure = kind;
    const AdjacencyOracle orc(scene, 0.0);

    const Id src = rng.below(n);
    const auto truth = textbook_bfs(orc, src);
    const auto g = bfs(scene, src, opt);
    if (g.layers != truth.layers || g.parent != truth.parent) f.add(cat(where, ": bfs from ", src, " differs"));

    const auto d = dfs(scene, rng.below(n), opt);
    if (auto bad = dfs_violation(d, orc); !bad.empty()) f.add(cat(where, ": dfs ", bad));

    double mean_size = 0.0;
    for (const auto& h : scene.members()) mean_size += h.size;
    mean_size /= static_cast<double>(n);
    const double r_mst = mean_size * rng.uniform(0.2, 2.0);
    const auto k = kruskal(scene, r_mst);
    const auto p = mst_prim(scene, r_mst, opt);
    if (std::abs(k.weight - p.weight) > 1e-9 || k.components != p.components || k.edges.size() != p.edges.size())
        f.add(cat(where, ": mst r0=", r_mst, " weight ", p.weight, " vs ", k.weight));
    for (const auto& [a, b] : p.edges)
        if (!(homothet_distance(body, scene[a], scene[b]) <= r_mst)) f.add(cat(where, ": mst edge above r0"));

    const Box3 dom = scene.domain();
    const Vec3 ext = dom.extent();
    const double spacing = std::cbrt(ext.x * ext.y * ext.z / static_cast<double>(n)) * body.max_stretch();
    const double r_dij = spacing * rng.uniform(0.8, 2.0);
    const Id dsrc = rng.below(n);
    const auto td = textbook_dijkstra(scene, r_dij, dsrc);
    const auto dj = dijkstra(scene, r_dij, dsrc, opt);
    for (Id v = 0; v < n; ++v) {
        const bool a = std::isfinite(td[v]), b = std::isfinite(dj.distances[v]);
        if (a != b || (a && std::abs(td[v] - dj.distances[v]) > 1e-9)) {
            f.add(cat(where, ": dijkstra r0=", r_dij, " from ", dsrc, " distance of ", v, " ", dj.distances[v],
                      " vs ", td[v]));
            break;
        }
    }

    for (std::size_t trial = 0; trial < rsp_trials; ++trial) {
        const Id s = rng.below(n), t = rng.below(n);
        const std::size_t hops = 1 + rng.below(std::max<std::size_t>(1, n / 4));
        const Id a = rng.below(n), b = rng.below(n);
        const double r = critical_value(body, scene[a], scene[b]) * rng.uniform(0.5, 1.0);
        std::vector<Id> path;
        const bool got = rsp_decision(scene, s, t, hops, r, opt, &path);
        if (got != hop_bounded_reachable(scene, s, t, hops, r)) {
            f.add(cat(where, ": rsp decision s=", s, " t=", t, " k=", hops, " r=", r));
        } else if (got) {
            RspResult rr{r, path, path.size() - 1};
            if (auto bad = rsp_path_violation(scene, rr, s, t, hops); !bad.empty())
                f.add(cat(where, ": rsp decision witness ", bad));
        }
    }
}

}  // namespace

CheckResult check_graph_exactness(std::size_t instances, std::size_t max_n, std::uint64_t seed) {
    Stopwatch sw;
    Failures f;
    const StructureKind kinds[] = {StructureKind::linear, StructureKind::fast, StructureKind::grouped};
    std::size_t total_n = 0;
    for (std::size_t i = 0; i < instances && f.count == 0; ++i) {
        CounterRng rng(seed, 0x6a00 + i);
        const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
        const std::size_t n = 2 + rng.below(max_n - 1);
        total_n += n;
        const Scene scene = random_scene(n, body, rng, rng.uniform(2.0, 10.0));
        const StructureKind kind = kinds[(i / 3) % 3];
        graph_checks_on(scene, kind, rng, f,
                        cat("instance ", i, " n ", n, " body ", body.type_name(), " structure ", to_string(kind)),
                        kind == StructureKind::fast ? 1 : 3);
    }
    CheckResult c = make_check("graph-engine", "graph-exactness", f,
                               cat(instances, " instances (", total_n, " vertices): bfs, dfs, mst, dijkstra, rsp"),
                               cat("suite=graph instances=", instances, " max_n=", max_n, " seed=", seed), sw);
    return c;
}

CheckResult check_rsp_exactness(std::size_t instances, std::size_t max_n, std::uint64_t seed) {
    Stopwatch sw;
    Failures f;
    const StructureKind kinds[] = {StructureKind::linear, StructureKind::grouped, StructureKind::fast};
    for (std::size_t i = 0; i < instances && f.count == 0; ++i) {
        CounterRng rng(seed, 0x7b00 + i);
        const ConvexBody body = random_body(static_cast<int>(i % 3), rng);
        const std::size_t n = 2 + rng.below(max_n - 1);
        const Scene scene = random_scene(n, body, rng, rng.uniform(1.0, 6.0));
        const std::size_t ks[] = {1, 3, (n + 9) / 10, n - 1};
        const std::size_t k = std::max<std::size_t>(1, ks[i % 4]);
        const Id s = rng.below(n);
        Id t = rng.below(n - 1);
        if (t >= s) ++t;
        GraphOptions opt;
        opt.structure = kinds[(i / 4) % 3];
        const std::string where = cat("instance ", i, " n ", n, " k ", k, " s ", s, " t ", t, " body ",
                                      body.type_name(), " structure ", to_string(opt.structure));
        const auto want = rsp_ascending_scan(scene, s, t, k);
        try {
            const RspResult got = rsp_solve(scene, s, t, k, opt);
            if (!want)
                f.add(where + ": solver found a path the scan did not");
            else if (got.r_star != *want)
                f.add(cat(where, ": r* ", got.r_star, " vs scan ", *want));
            else if (auto bad = rsp_path_violation(scene, got, s, t, k); !bad.empty())
                f.add(where + ": " + bad);
        } catch (const NoPath&) {
            if (want) f.add(where + ": solver reported no path");
        }
    }
    return make_check("graph-engine", "rsp-exactness", f, cat(instances, " instances, k in {1, 3, n/10, n-1}"),
                      cat("suite=rsp instances=", instances, " max_n=", max_n, " seed=", seed), sw);
}

// ---------------------------------------------------------------------------

CheckResult check_rebuild_accounting(std::size_t workloads, std::uint64_t seed) {
    Stopwatch sw;
    Failures f;
    std::size_t events = 0, deep_events = 0, audits = 0;
    for (std::size_t w = 0; w < workloads && f.count == 0; ++w) {
        CounterRng rng(seed, 0x8c00 + w);
        const ConvexBody body = random_body(static_cast<int>(w % 3), rng);
        const std::size_t n = 300 + rng.below(300);
        const Scene scene = random_scene(n, body, rng, 8.0);
        FastConfig cfg;
        cfg.t = w % 2 ? 8.0 : 16.0;
        cfg.seed = rng();
        auto storage = std::make_shared<const std::vector<Homothet>>(scene.members());
        std::vector<Id> ids(n);
        std::iota(ids.begin(), ids.end(), Id{0});
        FastTree tree(body, storage, ids, cfg);
        const std::string where = cat("workload ", w, " n ", n, " t ", cfg.t, " body ", body.type_name());
        if (auto a = tree.audit(); !a.ok) f.add(where + ": initial audit: " + a.violations.front());

        // Independent model of the root counter.
        std::size_t nu = n;
        auto chi_of = [&](std::size_t v) {
            return static_cast<std::size_t>(std::ceil(static_cast<double>(v) / (2.0 * cfg.t)));
        };
        std::size_t chi = nu > cfg.leaf_size ? chi_of(nu) : 0;
        std::size_t root_events = 0;

        std::vector<Id> order = ids;
        for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
        const std::size_t deletions = n * 3 / 4;
        std::size_t seen = 0;
        for (std::size_t d = 0; d < deletions && f.count == 0; ++d) {
            tree.remove(order[d]);
            --nu;
            if (chi > 0 && --chi == 0) {
                ++root_events;
                chi = nu > cfg.leaf_size ? chi_of(nu) : 0;
            }
            const auto& log = tree.rebuild_log();
            std::size_t root_seen = 0;
            for (const auto& e : log) root_seen += e.node == 0;
            if (root_seen != root_events)
                f.add(cat(where, ": root rebuilt ", root_seen, " times after ", d + 1, " deletions, expected ",
                          root_events));
            if (log.size() > seen) {
                for (std::size_t e = seen; e < log.size(); ++e) {
                    const auto& ev = log[e];
                    if (ev.chi_at_build != chi_of(ev.nu_at_build))
                        f.add(cat(where, ": node ", ev.node, " counter ", ev.chi_at_build, " != ceil(nu/2t)"));
                    if (ev.deletions != ev.chi_at_build)
                        f.add(cat(where, ": node ", ev.node, " rebuilt after ", ev.deletions, " deletions, expected ",
                                  ev.chi_at_build));
                    deep_events += ev.depth > 0;
                }
                for (std::size_t e = seen; e < log.size(); ++e) {
                    ++audits;
                    if (auto a = tree.audit_subtree(log[e].node); !a.ok)
                        f.add(cat(where, ": audit of node ", log[e].node, " after its rebuild at deletion ", d + 1,
                                  ": ", a.violations.front()));
                }
                events += log.size() - seen;
                seen = log.size();
            }
            if (d % 32 == 31) {
                ++audits;
                if (auto a = tree.audit(); !a.ok)
                    f.add(cat(where, ": full audit after ", d + 1, " deletions: ", a.violations.front()));
            }
            if (d % 16 == 0) {
                const Homothet q{scene[rng.below(n)].center, rng.uniform(0.0, 1.5)};
                std::vector<Id> truth;
                for (Id id = 0; id < n; ++id)
                    if (tree.live(id) && intersects(body, scene[id], q)) truth.push_back(id);
                if (tree.report(q) != truth || tree.detect(q).has_value() != !truth.empty())
                    f.add(cat(where, ": query after ", d + 1, " deletions differs from the oracle"));
            }
        }
        if (auto a = tree.audit(); !a.ok) f.add(where + ": final audit: " + a.violations.front());
    }
    if (f.count == 0 && events == 0) f.add("no rebuild was triggered");
    CheckResult c = make_check("proximity-index", "rebuild-accounting", f,
                               cat(workloads, " workloads, ", events, " rebuilds (", deep_events,
                                   " below the root), ", audits, " post-rebuild audits of P1/P3/P4"),
                               cat("suite=rebuild workloads=", workloads, " seed=", seed), sw);
    c.metrics = {{"rebuilds", events}, {"deep_rebuilds", deep_events}, {"audits", audits}};
    return c;
}

// ---------------------------------------------------------------------------

Checks verify_scene(const Scene& scene, std::uint64_t seed, StructureKind structure) {
    Checks out;
    const std::size_t n = scene.size();
    const ConvexBody& body = scene.body();
    const std::string repro = cat("verify --seed ", seed, " --structure ", to_string(structure), " (n=", n, ")");
    CounterRng rng(seed, 0x5eed);
    auto pair = [&]() { return std::pair<Id, Id>{rng.below(n), rng.below(n)}; };

    if (n == 0) {
        CheckResult c;
        c.module = "cli-harness";
        c.invariant = "nonempty-scene";
        c.ok = false;
        c.detail = "scene has no members";
        c.repro = repro;
        out.push_back(c);
        return out;
    }

    {  // Kernel properties on the scene's own pairs.
        Stopwatch sw;
        Failures sym, cross, cont, dom;
        const std::size_t trials = std::min<std::size_t>(2000, n * n);
        for (std::size_t i = 0; i < trials; ++i) {
            const auto [a, b] = pair();
            const Homothet &ka = scene[a], &kb = scene[b];
            if (homothet_distance(body, ka, kb) != homothet_distance(body, kb, ka) ||
                intersects(body, ka, kb) != intersects(body, kb, ka))
                sym.add(cat("pair ", a, ",", b));
            if (a == b) continue;
            if (!contains(body, ka, kb) && !contains(body, kb, ka)) {
                if (auto bad = single_crossing_case(body, ka, kb, random_direction(rng)); !bad.empty())
                    cross.add(cat("pair ", a, ",", b, ": ", bad));
                if (auto bad = domination_case(body, ka, kb); !bad.empty()) dom.add(cat("pair ", a, ",", b, ": ", bad));
            }
            if (auto bad = containment_case(body, ka, kb, rng); !bad.empty())
                cont.add(cat("pair ", a, ",", b, ": ", bad));
        }
        const std::string d = cat(trials, " sampled pairs");
        out.push_back(make_check("geometry-kernel", "distance-symmetry", sym, d, repro, sw));
        out.push_back(make_check("geometry-kernel", "single-crossing", cross, d, repro, sw));
        out.push_back(make_check("geometry-kernel", "containment-criterion", cont, d, repro, sw));
        out.push_back(make_check("geometry-kernel", "center-domination", dom, d, repro, sw));
    }

    {  // Oracle graph symmetry and threshold monotonicity.
        Stopwatch sw;
        Failures f;
        double mean = 0.0;
        for (const auto& h : scene.members()) mean += h.size;
        mean /= static_cast<double>(n);
        const AdjacencyOracle g0(scene, 0.0), g1(scene, mean);
        for (Id i = 0; i < n && f.count == 0; ++i) {
            for (Id j : g0.neighbors(i)) {
                if (!g0.edge(j, i)) f.add(cat("edge ", i, "-", j, " not symmetric"));
                if (!g1.edge(i, j)) f.add(cat("edge ", i, "-", j, " lost at a larger threshold"));
            }
            if (g0.edge(i, i)) f.add("self loop");
        }
        out.push_back(make_check("reference-oracle", "adjacency-symmetry-monotonicity", f,
                                 cat(g0.edge_count(), " edges at r0=0, ", g1.edge_count(), " at r0=", mean), repro, sw));
    }
    {  // Critical values.
        Stopwatch sw;
        Failures f;
        const auto cv = critical_values(scene);
        for (std::size_t i = 0; i < cv.size(); ++i) {
            if (cv[i] < 0.0) f.add("negative critical value");
            if (i > 0 && !(cv[i] - cv[i - 1] > 1e-12)) f.add("list not deduplicated to 1e-12");
        }
        if (count_critical_leq(scene, -1.0) != 0) f.add("count below 0 is not 0");
        if (!cv.empty() && count_critical_leq(scene, cv.back()) != n * (n - 1) / 2) f.add("count at max is not C(n,2)");
        out.push_back(make_check("reference-oracle", "critical-values", f, cat(cv.size(), " distinct values"), repro, sw));
    }

    if (n >= 16) {  // Cutting tiling, soundness and conflict lists.
        Stopwatch sw;
        Failures tiling, sound, superset, bound;
        CuttingConfig cc;
        cc.t = std::min(8.0, static_cast<double>(n) / 2.0);
        cc.seed = seed;
        const Cutting cut = build_cutting(scene, cc);
        const Box3& d = cut.domain();
        for (int i = 0; i < 1000; ++i) {
            const Vec3 x{rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y), rng.uniform(d.lo.z, d.hi.z)};
            const auto all = cut.locate_brute(x);
            const auto one = cut.locate(x);
            if (all.size() != 1 || !one || all[0] != *one) {
                tiling.add(cat("point (", x.x, ",", x.y, ",", x.z, ") in ", all.size(), " prisms"));
                continue;
            }
            const Prism& p = cut.prisms()[*one];
            const double top = cut.ceiling_at(body, scene.members(), *one, x);
            const double rho = std::isfinite(top) ? top - rng.uniform(0.0, 2.0) : rng.uniform(-1.0, 5.0);
            for (Id j = 0; j < n; ++j)
                if (point_distance(body, scene[j], x) <= rho && !std::binary_search(p.conflict.begin(), p.conflict.end(), j))
                    sound.add(cat("member ", j, " below the ceiling but missing from the conflict list"));
        }
        for (std::size_t pi = 0; pi < cut.prisms().size(); ++pi) {
            const Prism& p = cut.prisms()[pi];
            if (!p.flagged && static_cast<double>(p.conflict.size()) > cut.conflict_bound())
                bound.add(cat("prism ", pi, " conflict ", p.conflict.size()));
            if (!p.ceiling) continue;
            const double hi = p.ceiling_bounds.hi;
            for (Id j = 0; j < n; ++j)
                if (box_bounds(body, scene[j], p.box).lo <= hi &&
                    !std::binary_search(p.conflict.begin(), p.conflict.end(), j))
                    superset.add(cat("prism ", pi, " misses member ", j));
        }
        const std::string dd = cat(cut.prisms().size(), " prisms, t=", cc.t);
        out.push_back(make_check("shallow-cutting", "tiling", tiling, "1000 probes in exactly one prism", repro, sw));
        out.push_back(make_check("shallow-cutting", "soundness", sound, "1000 probes below the ceiling", repro, sw));
        out.push_back(make_check("shallow-cutting", "conflict-superset", superset, dd, repro, sw));
        out.push_back(make_check("shallow-cutting", "conflict-bound", bound, dd, repro, sw));
    }

    for (StructureKind kind : {StructureKind::fast, StructureKind::grouped, StructureKind::linear}) {
        Stopwatch sw;
        Failures f;
        auto index = make_index(kind, scene);
        std::vector<char> alive(n, 1);
        const Box3& d = scene.domain();
        std::size_t queries = 0;
        for (int i = 0; i < 300; ++i) {
            if (i % 5 == 4) {
                const Id victim = rng.below(n);
                if (alive[victim] && index->live_count() > 1) {
                    index->remove(victim);
                    alive[victim] = 0;
                }
            }
            const Homothet q{{rng.uniform(d.lo.x, d.hi.x), rng.uniform(d.lo.y, d.hi.y), rng.uniform(d.lo.z, d.hi.z)},
                             rng.uniform(0.0, 2.0)};
            std::vector<Id> truth;
            double best = std::numeric_limits<double>::infinity();
            for (Id j = 0; j < n; ++j)
                if (alive[j]) {
                    if (intersects(body, scene[j], q)) truth.push_back(j);
                    best = std::min(best, homothet_distance(body, scene[j], q));
                }
            ++queries;
            const auto w = index->detect(q);
            if (w.has_value() != !truth.empty() || (w && !std::binary_search(truth.begin(), truth.end(), *w)))
                f.add(cat("detect query ", i));
            if (index->report(q) != truth) f.add(cat("report query ", i));
            if (i % 10 == 0 && std::abs(nearest(*index, q).distance - best) > 1e-8) f.add(cat("nearest query ", i));
        }
        if (auto* fi = dynamic_cast<FastIndex*>(index.get())) {
            for (std::size_t j = 0; j < fi->layer_count(); ++j)
                if (fi->layer(j))
                    if (auto a = fi->layer(j)->audit(); !a.ok) f.add("fast tree audit: " + a.violations.front());
            if (!fi->audit_layers()) f.add("layer audit");
        }
        out.push_back(make_check("proximity-index", "oracle-equivalence/" + to_string(kind), f,
                                 cat(queries, " detect/report queries with interleaved deletions"), repro, sw));
    }

    {  // Graph algorithms.
        Stopwatch sw;
        Failures f;
        graph_checks_on(scene, structure, rng, f, "scene", 5);
        out.push_back(make_check("graph-engine", "bfs-dfs-mst-dijkstra-rsp", f,
                                 "textbook algorithms on the materialized adjacency", repro, sw));
    }
    if (n >= 2 && n <= 400) {
        Stopwatch sw;
        Failures f;
        GraphOptions opt;
        opt.structure = structure;
        for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::max<std::size_t>(1, n - 1)}) {
            const Id s = rng.below(n);
            Id t = rng.below(n - 1);
            if (t >= s) ++t;
            const auto want = rsp_ascending_scan(scene, s, t, k);
            try {
                const auto got = rsp_solve(scene, s, t, k, opt);
                if (!want || got.r_star != *want) f.add(cat("s ", s, " t ", t, " k ", k));
            } catch (const NoPath&) {
                if (want) f.add(cat("s ", s, " t ", t, " k ", k, ": spurious no-path"));
            }
        }
        out.push_back(make_check("graph-engine", "rsp-exactness", f, "k in {1, 3, n-1}", repro, sw));
    }
    return out;
}

}  // namespace hprox
