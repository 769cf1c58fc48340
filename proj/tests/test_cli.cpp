// Runs the command-line tool as a subprocess and checks exit codes and
// output formats.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string err;
};

const fs::path& workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("hprox_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run run(const std::string& args) {
    const fs::path err = workdir() / "stderr.txt";
    const std::string cmd = std::string(HPROX_CLI) + " " + args + " 2> " + err.string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("generate is byte-deterministic") {
    REQUIRE(run("generate --n 150 --seed 9 --body lp --out " + path("a.json")).code == 0);
    REQUIRE(run("generate --n 150 --seed 9 --body lp --out " + path("b.json")).code == 0);
    CHECK(slurp(path("a.json")) == slurp(path("b.json")));
    const json j = json::parse(slurp(path("a.json")));
    CHECK(j["body"]["type"] == "lp");
    CHECK(j["homothets"].size() == 150);
    CHECK(j["homothets"][0].contains("c"));
    CHECK(j["homothets"][0].contains("rho"));
}

TEST_CASE("verify passes on a 100-member scene") {
    REQUIRE(run("generate --n 100 --seed 2 --body ellipsoid --size-law uniform --out " + path("v.json")).code == 0);
    const Run r = run("verify --scene " + path("v.json") + " --structure fast --out " + path("report.json"));
    INFO(r.err);
    CHECK(r.code == 0);
    const json rep = json::parse(slurp(path("report.json")));
    CHECK(rep["ok"] == true);
    CHECK(rep["checks"].size() >= 10);
    for (const auto& c : rep["checks"]) {
        CHECK(c["ok"] == true);
        CHECK(c.contains("module"));
        CHECK(c.contains("invariant"));
    }
}

TEST_CASE("verify names the violated invariant and exits nonzero") {
    std::ofstream(path("bad.json")) << R"({"body":{"type":"euclidean"},"homothets":[{"c":[0,0,0],"rho":-2}]})";
    const Run r = run("verify --scene " + path("bad.json") + " --seed 5");
    CHECK(r.code != 0);
    const json err = json::parse(r.err);
    CHECK(err["status"] == "fail");
    CHECK(err["module"] == "cli-harness");
    CHECK(err["invariant"] == "scene-schema");
    CHECK(err["seed"] == 5);
    CHECK(err["repro"].get<std::string>().find("bad.json") != std::string::npos);
}

TEST_CASE("bfs layers agree between oracle and fast structures") {
    REQUIRE(run("generate --n 400 --seed 4 --out " + path("g.json")).code == 0);
    REQUIRE(run("bfs --scene " + path("g.json") + " --structure oracle --out " + path("bo.json")).code == 0);
    REQUIRE(run("bfs --scene " + path("g.json") + " --structure fast --out " + path("bf.json")).code == 0);
    REQUIRE(run("bfs --scene " + path("g.json") + " --budget 1e9 --out " + path("bb.json")).code == 0);
    CHECK(slurp(path("bo.json")) == slurp(path("bf.json")));
    CHECK(slurp(path("bo.json")) == slurp(path("bb.json")));
}

TEST_CASE("every subcommand runs") {
    const std::string s = " --scene " + path("g.json");
    for (const std::string cmd : {"build --structure grouped", "build --structure cutting --t 8", "query --k 5",
                                  "dfs --source 3", "mst --r0 0.5", "dijkstra --r0 2 --source 1",
                                  "rsp --source 0 --target 9 --k 3"}) {
        const Run r = run(cmd + s + " --out " + path("o.txt"));
        INFO(cmd << ": " << r.err);
        CHECK(r.code == 0);
    }
    CHECK(run("bfs" + s + " --source 100000").code != 0);
    CHECK(run("mst" + s + " --r0 -1").code != 0);
    CHECK(run("frobnicate").code != 0);
}

TEST_CASE("bench writes one timing row per size and op") {
    const Run r = run("bench --mode scaling --sizes 500,1000 --out " + path("t.csv"));
    INFO(r.err);
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(path("t.csv")));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "n,structure,op,count,wall_ms,peak_mem_bytes");
    std::vector<std::string> counts;
    while (std::getline(csv, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        REQUIRE(cells.size() == 6);
        counts.push_back(cells[3]);
    }
    REQUIRE(counts.size() == 4);  // index and baseline for each n
    // Both rows of a size count the vertices reached from the same source.
    CHECK(counts[0] == counts[1]);
    CHECK(counts[2] == counts[3]);
    CHECK(counts[0] != "0");
    const json summary = json::parse(r.err);
    CHECK(summary.contains("slope"));

    REQUIRE(run("bench --mode cutting --n 300 --t 4 --out " + path("c.csv")).code == 0);
    std::istringstream c(slurp(path("c.csv")));
    std::getline(c, line);
    CHECK(line == "n,t,prism_count,max_conflict,flagged_leaves,level_window_fraction,wall_time_ms");

    REQUIRE(run("bench --mode queries --n 300 --structure fast --k 50 --out " + path("q.csv")).code == 0);
}
