#include "hprox/scene_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hprox {

using nlohmann::json;

namespace {

std::array<double, 3> triple(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw SceneError(std::string(what) + " must be an array of 3 numbers");
    std::array<double, 3> out{};
    for (std::size_t k = 0; k < 3; ++k) {
        if (!j[k].is_number()) throw SceneError(std::string(what) + " must contain numbers");
        out[k] = j[k].get<double>();
    }
    return out;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SceneError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

std::array<double, 3> parse_triple(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) throw BodyError("expected three comma-separated numbers, got '" + s + "'");
    return {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

json body_to_json(const ConvexBody& body) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConvexBody::Euclidean>) {
                return {{"type", "euclidean"}};
            } else if constexpr (std::is_same_v<T, ConvexBody::Ellipsoid>) {
                json q = json::array();
                for (const auto& row : v.q) q.push_back({row[0], row[1], row[2]});
                return {{"type", "ellipsoid"}, {"Q", q}};
            } else {
                return {{"type", "lp"}, {"p", v.p}, {"scale", {v.scale[0], v.scale[1], v.scale[2]}}};
            }
        },
        body.variant());
}

ConvexBody body_from_json(const json& j) {
    const json& type = field(j, "type");
    if (!type.is_string()) throw SceneError("body type must be a string");
    const std::string t = type.get<std::string>();
    if (t == "euclidean") return ConvexBody::euclidean();
    if (t == "ellipsoid") {
        if (j.contains("Q")) {
            const json& q = j.at("Q");
            if (!q.is_array() || q.size() != 3) throw SceneError("ellipsoid Q must be a 3x3 array");
            Mat3 m{};
            for (std::size_t r = 0; r < 3; ++r) m[r] = triple(q[r], "ellipsoid Q row");
            return ConvexBody::ellipsoid(m);
        }
        const auto a = triple(field(j, "axes"), "ellipsoid axes");
        return ConvexBody::ellipsoid_axes(a[0], a[1], a[2]);
    }
    if (t == "lp") {
        const json& p = field(j, "p");
        if (!p.is_number_integer()) throw SceneError("lp exponent p must be an integer");
        std::array<double, 3> scale{1.0, 1.0, 1.0};
        if (j.contains("scale")) scale = triple(j.at("scale"), "lp scale");
        return ConvexBody::superball(p.get<int>(), scale);
    }
    throw SceneError("unknown body type '" + t + "' (euclidean|ellipsoid|lp)");
}

json scene_to_json(const Scene& scene) {
    json hs = json::array();
    for (const auto& h : scene.members())
        hs.push_back({{"c", {h.center.x, h.center.y, h.center.z}}, {"rho", h.size}});
    return {{"body", body_to_json(scene.body())}, {"homothets", hs}};
}

Scene scene_from_json(const json& j) {
    const ConvexBody body = body_from_json(field(j, "body"));
    const json& hs = field(j, "homothets");
    if (!hs.is_array()) throw SceneError("homothets must be an array");
    std::vector<Homothet> members;
    members.reserve(hs.size());
    for (const auto& h : hs) {
        const auto c = triple(field(h, "c"), "homothet center");
        const json& rho = field(h, "rho");
        if (!rho.is_number()) throw SceneError("homothet rho must be a number");
        members.push_back({{c[0], c[1], c[2]}, rho.get<double>()});
    }
    return Scene(body, std::move(members));
}

Scene read_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SceneError("cannot open scene file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SceneError("scene file '" + path + "' is not valid JSON: " + e.what());
    }
    return scene_from_json(j);
}

std::string dump_scene(const Scene& scene) { return scene_to_json(scene).dump(1) + "\n"; }

void write_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << dump_scene(scene);
}

json graph_result_to_json(const GraphResult& g) {
    json j{{"algorithm", g.algorithm}, {"parents", g.parent}};
    if (g.source) j["source"] = *g.source;
    if (g.algorithm == "bfs") j["layers"] = g.layers;
    if (g.algorithm == "dfs") {
        j["order"] = g.order;
        j["components"] = g.components;
    }
    if (g.algorithm == "dijkstra") {
        json d = json::array();
        for (double x : g.distances) d.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        j["distances"] = d;
    }
    if (g.algorithm == "mst") {
        json e = json::array();
        for (const auto& [a, b] : g.edges) e.push_back({a, b});
        j["edges"] = e;
        j["weight"] = g.weight;
        j["components"] = g.components;
    }
    if (g.algorithm == "rsp") {
        j["r_star"] = g.r_star ? json(*g.r_star) : json(nullptr);
        j["path"] = g.path;
        j["hops"] = g.path.empty() ? 0 : g.path.size() - 1;
    }
    return j;
}

GraphResult graph_result_from_json(const json& j) {
    GraphResult g;
    g.algorithm = field(j, "algorithm").get<std::string>();
    g.parent = field(j, "parents").get<std::vector<long>>();
    if (j.contains("source")) g.source = j.at("source").get<Id>();
    if (j.contains("layers")) g.layers = j.at("layers").get<std::vector<std::vector<Id>>>();
    if (j.contains("order")) g.order = j.at("order").get<std::vector<Id>>();
    if (j.contains("distances"))
        for (const auto& d : j.at("distances"))
            g.distances.push_back(d.is_null() ? std::numeric_limits<double>::infinity() : d.get<double>());
    if (j.contains("edges"))
        for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<Id>(), e.at(1).get<Id>());
    if (j.contains("weight")) g.weight = j.at("weight").get<double>();
    if (j.contains("components")) g.components = j.at("components").get<std::size_t>();
    if (j.contains("r_star") && !j.at("r_star").is_null()) g.r_star = j.at("r_star").get<double>();
    if (j.contains("path")) g.path = j.at("path").get<std::vector<Id>>();
    return g;
}

ConvexBody parse_body_spec(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.empty()) throw BodyError("empty body specification");
    const std::string& name = parts[0];
    if (name == "euclidean" && parts.size() == 1) return ConvexBody::euclidean();
    if (name == "ellipsoid" && parts.size() <= 2) {
        const auto a = parts.size() == 2 ? parse_triple(parts[1]) : std::array<double, 3>{1.0, 2.0, 4.0};
        return ConvexBody::ellipsoid_axes(a[0], a[1], a[2]);
    }
    if (name == "lp" && parts.size() <= 3) {
        const int p = parts.size() >= 2 ? std::stoi(parts[1]) : 4;
        const auto s = parts.size() == 3 ? parse_triple(parts[2]) : std::array<double, 3>{1.0, 1.0, 1.0};
        return ConvexBody::superball(p, s);
    }
    throw BodyError("unknown body '" + spec + "' (euclidean | ellipsoid[:a,b,c] | lp[:p[:a,b,c]])");
}

std::string cutting_csv_row(const CuttingReport& r) {
    std::ostringstream s;
    s << r.n << ',' << r.t << ',' << r.prism_count << ',' << r.max_conflict << ',' << r.flagged_leaves
      << ',' << fmt(r.level_window_fraction) << ',' << fmt(r.wall_time_ms);
    return s.str();
}

std::string timing_csv_row(const TimingRow& r) {
    std::ostringstream s;
    s << r.n << ',' << r.structure << ',' << r.op << ',' << r.count << ',' << fmt(r.wall_ms) << ','
      << r.peak_mem_bytes;
    return s.str();
}

void write_csv(const std::string& path, const std::string& header, const std::vector<std::string>& rows) {
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (path != "-") {
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write '" + path + "'");
        out = &file;
    }
    *out << header << '\n';
    for (const auto& r : rows) *out << r << '\n';
}

void write_json(const std::string& path, const json& j) {
    if (path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace hprox
