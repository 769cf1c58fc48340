// Python bindings. Structured results cross the boundary as JSON text and
// are decoded by the hprox package, so the wire format is the same one the
// command-line harness writes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hprox/cutting.hpp"
#include "hprox/generate.hpp"
#include "hprox/graph.hpp"
#include "hprox/index.hpp"
#include "hprox/oracle.hpp"
#include "hprox/scene_io.hpp"
#include "hprox/verify.hpp"

namespace py = pybind11;
using namespace hprox;

namespace {

using Center = std::array<double, 3>;

Homothet to_homothet(const Center& c, double rho) { return {{c[0], c[1], c[2]}, rho}; }

GraphOptions graph_options(const std::string& structure, std::uint64_t seed) {
    GraphOptions o;
    o.structure = parse_structure(structure);
    o.index.fast.seed = seed;
    return o;
}

Scene make_scene(const std::string& body, const std::vector<std::tuple<Center, double>>& members) {
    std::vector<Homothet> hs;
    hs.reserve(members.size());
    for (const auto& [c, rho] : members) hs.push_back(to_homothet(c, rho));
    return Scene(parse_body_spec(body), std::move(hs));
}

class PyIndex {
public:
    PyIndex(const Scene& scene, const std::string& structure, std::uint64_t seed) {
        IndexOptions o;
        o.fast.seed = seed;
        index_ = make_index(parse_structure(structure), scene, o);
    }
    std::optional<Id> detect(const Center& c, double rho) const { return index_->detect(to_homothet(c, rho)); }
    std::vector<Id> report(const Center& c, double rho) const { return index_->report(to_homothet(c, rho)); }
    std::tuple<Id, double> nearest(const Center& c, double rho) const {
        const Neighbor nb = hprox::nearest(*index_, to_homothet(c, rho));
        return {nb.id, nb.distance};
    }
    Id insert(const Center& c, double rho) { return index_->insert(to_homothet(c, rho)); }
    void remove(Id id) { index_->remove(id); }
    bool live(Id id) const { return index_->live(id); }
    std::size_t live_count() const { return index_->live_count(); }
    std::string structure() const { return to_string(index_->kind()); }
    std::string stats() const { return index_->stats().dump(); }

private:
    std::unique_ptr<ProximityIndex> index_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Proximity indexes over homothets of a convex body and implicit-graph algorithms.";

    py::register_exception<SceneError>(m, "SceneError", PyExc_ValueError);
    py::register_exception<NoPath>(m, "NoPath", PyExc_LookupError);

    py::class_<Scene>(m, "Scene")
        .def(py::init(&make_scene), py::arg("body"), py::arg("members"),
             "Scene from a body spec (euclidean, ellipsoid[:a,b,c], lp[:p[:a,b,c]]) and (center, rho) pairs.")
        .def_static("from_json", [](const std::string& text) { return scene_from_json(nlohmann::json::parse(text)); })
        .def_static("load", &read_scene, py::arg("path"))
        .def("save", [](const Scene& s, const std::string& path) { write_scene(s, path); }, py::arg("path"))
        .def("to_json", &dump_scene)
        .def("__len__", &Scene::size)
        .def_property_readonly("body", [](const Scene& s) { return s.body().type_name(); })
        .def("member",
             [](const Scene& s, Id i) {
                 const Homothet& h = s[i];
                 return std::make_tuple(Center{h.center.x, h.center.y, h.center.z}, h.size);
             },
             py::arg("id"))
        .def("distance",
             [](const Scene& s, Id i, Id j) { return homothet_distance(s.body(), s[i], s[j]); },
             py::arg("i"), py::arg("j"), "Canonical homothet distance between two members.");

    m.def(
        "generate",
        [](std::size_t n, std::uint64_t seed, const std::string& body, const std::string& distribution,
           const std::string& size_law, double degree) {
            GeneratorSpec g;
            g.n = n;
            g.seed = seed;
            g.body = parse_body_spec(body);
            g.distribution = parse_distribution(distribution);
            g.size_law = parse_size_law(size_law);
            g.target_degree = degree;
            return generate(g);
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("body") = "euclidean", py::arg("distribution") = "uniform",
        py::arg("size_law") = "constant", py::arg("degree") = 8.0);

    py::class_<PyIndex>(m, "Index")
        .def(py::init<const Scene&, const std::string&, std::uint64_t>(), py::arg("scene"),
             py::arg("structure") = "linear", py::arg("seed") = 1)
        .def("detect", &PyIndex::detect, py::arg("center"), py::arg("rho"))
        .def("report", &PyIndex::report, py::arg("center"), py::arg("rho"))
        .def("nearest", &PyIndex::nearest, py::arg("center"), py::arg("rho"))
        .def("insert", &PyIndex::insert, py::arg("center"), py::arg("rho"))
        .def("remove", &PyIndex::remove, py::arg("id"))
        .def("live", &PyIndex::live, py::arg("id"))
        .def("__len__", &PyIndex::live_count)
        .def_property_readonly("structure", &PyIndex::structure)
        .def("stats_json", &PyIndex::stats);

    m.def(
        "bfs_json",
        [](const Scene& s, Id source, double r0, const std::string& structure, std::uint64_t seed) {
            return graph_result_to_json(bfs(s, source, graph_options(structure, seed), r0)).dump();
        },
        py::arg("scene"), py::arg("source"), py::arg("r0") = 0.0, py::arg("structure") = "linear",
        py::arg("seed") = 1);
    m.def(
        "dfs_json",
        [](const Scene& s, Id source, double r0, const std::string& structure, std::uint64_t seed) {
            return graph_result_to_json(dfs(s, source, graph_options(structure, seed), r0)).dump();
        },
        py::arg("scene"), py::arg("source"), py::arg("r0") = 0.0, py::arg("structure") = "linear",
        py::arg("seed") = 1);
    m.def(
        "mst_json",
        [](const Scene& s, double r0, const std::string& structure, std::uint64_t seed) {
            return graph_result_to_json(mst_prim(s, r0, graph_options(structure, seed))).dump();
        },
        py::arg("scene"), py::arg("r0"), py::arg("structure") = "linear", py::arg("seed") = 1);
    m.def(
        "dijkstra_json",
        [](const Scene& s, double r0, Id source, const std::string& structure, std::uint64_t seed) {
            return graph_result_to_json(dijkstra(s, r0, source, graph_options(structure, seed))).dump();
        },
        py::arg("scene"), py::arg("r0"), py::arg("source"), py::arg("structure") = "linear", py::arg("seed") = 1);
    m.def(
        "rsp",
        [](const Scene& s, Id source, Id target, std::size_t k, const std::string& structure, std::uint64_t seed) {
            const RspResult r = rsp_solve(s, source, target, k, graph_options(structure, seed));
            return std::make_tuple(r.r_star, r.path);
        },
        py::arg("scene"), py::arg("source"), py::arg("target"), py::arg("k"), py::arg("structure") = "linear",
        py::arg("seed") = 1, "Returns (r_star, path); raises NoPath when no k-hop path exists at any radius.");
    m.def("rsp_oracle", &rsp_ascending_scan, py::arg("scene"), py::arg("source"), py::arg("target"), py::arg("k"),
          "Ascending scan over the critical values; None when no k-hop path exists.");
    m.def("brute_intersections",
          [](const Scene& s, const Center& c, double rho) { return brute_intersections(s, to_homothet(c, rho)); },
          py::arg("scene"), py::arg("center"), py::arg("rho"));

    m.def(
        "cutting_report_json",
        [](const Scene& s, double t, std::uint64_t seed) {
            CuttingConfig cc;
            cc.t = t;
            cc.seed = seed;
            const CuttingReport r = verify_cutting(s, build_cutting(s, cc), cc);
            return nlohmann::json{{"n", r.n},
                                  {"t", r.t},
                                  {"prism_count", r.prism_count},
                                  {"max_conflict", r.max_conflict},
                                  {"flagged_leaves", r.flagged_leaves},
                                  {"level_window_fraction", r.level_window_fraction},
                                  {"wall_time_ms", r.wall_time_ms}}
                .dump();
        },
        py::arg("scene"), py::arg("t") = 8.0, py::arg("seed") = 1);
    m.def(
        "verify_json",
        [](const Scene& s, std::uint64_t seed, const std::string& structure) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& c : verify_scene(s, seed, parse_structure(structure))) out.push_back(to_json(c));
            return out.dump();
        },
        py::arg("scene"), py::arg("seed") = 1, py::arg("structure") = "linear");
}
