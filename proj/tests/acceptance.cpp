// Acceptance runner: one PASS/FAIL line per criterion. `--quick` shrinks
// every workload for smoke runs; `--criterion N` runs a single one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hprox/bench.hpp"
#include "hprox/verify.hpp"

using namespace hprox;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    std::string repro;
};

Outcome from_checks(const Checks& cs) {
    Outcome o;
    for (const auto& c : cs) {
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += c.invariant + " " + (c.ok ? "ok" : "FAILED") + " (" + c.detail + ")";
        if (!c.ok && o.ok) o.repro = c.module + "/" + c.invariant + ": " + c.repro;
        o.ok = o.ok && c.ok;
    }
    return o;
}

Outcome from_check(const CheckResult& c) { return from_checks({c}); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    bool quick = false;
    int only = 0;
    std::uint64_t seed = 1;
    app.add_flag("--quick", quick, "Scaled-down workloads");
    app.add_option("--criterion", only, "Run only this criterion (1-8)");
    app.add_option("--seed", seed, "Base seed");
    CLI11_PARSE(app, argc, argv);

    const double scale = quick ? 0.1 : 1.0;
    auto scaled = [&](std::size_t v) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(v) * scale)));
    };

    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // wall-clock budget, 0 if none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "dynamic oracle equivalence", 300.0,
         [&] {
             DynamicOptions o;
             o.sequences = scaled(1000);
             o.seed = seed;
             return from_check(check_dynamic_equivalence(o));
         }},
        {2, "structural lemmas", 0.0, [&] { return from_checks(check_kernel_lemmas(scaled(100000), seed)); }},
        {3, "cutting contract", 360.0,
         [&] {
             Checks cs;
             for (double t : {4.0, 8.0, 16.0}) cs.push_back(check_cutting_contract(quick ? 1000 : 2000, t, seed));
             return from_checks(cs);
         }},
        {4, "shallow net", 0.0,
         [&] { return from_check(check_shallow_net(quick ? 1000 : 4000, 1.0 / 16, scaled(10000), seed)); }},
        {5, "graph exactness", 0.0, [&] { return from_check(check_graph_exactness(scaled(200), 500, seed)); }},
        {6, "rsp exactness", 0.0, [&] { return from_check(check_rsp_exactness(scaled(100), 300, seed)); }},
        {7, "bfs scaling", 0.0,
         [&] {
             ScalingOptions o;
             o.seed = seed;
             if (quick) o.sizes = {1000, 2000, 4000};
             const ScalingReport r = run_bfs_scaling(o);
             Outcome out;
             out.ok = r.slope <= 1.9;
             char buf[256];
             std::snprintf(buf, sizeof buf, "log-log slope %.3f (binding <= 1.9); index/baseline at n=%zu: %.3f (target <= 0.5, reported)",
                           r.slope, o.sizes.back(), r.ratio_at_max);
             out.detail = buf;
             for (const auto& row : r.rows)
                 out.detail += "; " + row.structure + "@" + std::to_string(row.n) + "=" +
                               std::to_string(row.wall_ms) + "ms";
             out.repro = "bench --mode scaling --seed " + std::to_string(seed);
             return out;
         }},
        {8, "rebuild accounting", 0.0, [&] { return from_check(check_rebuild_accounting(scaled(50), seed)); }},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (only != 0 && only != c.id) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0 && s > c.limit_s) {
            o.ok = false;
            o.detail += "; exceeded the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget";
        }
        std::printf("%s criterion %d (%s) [%.1f s]: %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, s, o.detail.c_str());
        if (!o.ok && !o.repro.empty()) std::printf("  reproduce: %s seed=%llu\n", o.repro.c_str(), static_cast<unsigned long long>(seed));
        std::fflush(stdout);
        all = all && o.ok;
    }
    return all ? 0 : 1;
}
