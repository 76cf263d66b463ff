#include "minksurf/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace minksurf {

namespace {

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& where) {
    if (!j.is_object()) fail(ErrorKind::Input, where + ": expected an object");
    for (const auto& [key, val] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            fail(ErrorKind::Input, where + ": unknown key '" + key + "'");
}

Vec3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        fail(ErrorKind::Input, where + ": expected [x, y, z]");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Input, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::Input, path + ": " + e.what());
    }
    return j;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

json RunConfig::echo() const {
    json j;
    j["grid_level"] = grid_level;
    if (punctures) {
        json ps = json::array();
        for (std::size_t k = 0; k < punctures->size(); ++k) {
            const Vec3& p = punctures->points[k].vec();
            ps.push_back({{"point", {p.x(), p.y(), p.z()}},
                          {"weight", punctures->weights[k]}});
        }
        j["punctures"] = ps;
    }
    if (n > 0) j["n"] = n;
    if (!n_values.empty()) j["n_values"] = n_values;
    j["solver"] = {{"tol_rel", solver.tol_rel},
                   {"max_iters", solver.max_iters},
                   {"line_search_shrink", solver.line_search_shrink}};
    j["tolerances"] = tolerances;
    j["out_dir"] = out_dir;
    j["export_obj"] = export_mesh;
    j["seed"] = seed;
    return j;
}

RunConfig parse_run_config(const json& j) {
    reject_unknown(j, {"grid_level", "punctures", "n", "n_values", "solver",
                       "tolerances", "out_dir", "export_obj", "seed"},
                   "config");
    RunConfig cfg;
    if (!j.contains("grid_level") || !j["grid_level"].is_number_integer())
        fail(ErrorKind::Input, "config: grid_level (integer) is required");
    cfg.grid_level = j["grid_level"].get<int>();

    if (j.contains("punctures")) {
        if (!j["punctures"].is_array())
            fail(ErrorKind::Input, "config: punctures must be an array");
        std::vector<UnitVector> pts;
        std::vector<double> w;
        for (const auto& e : j["punctures"]) {
            reject_unknown(e, {"point", "weight"}, "config.punctures[]");
            if (!e.contains("point") || !e.contains("weight") || !e["weight"].is_number())
                fail(ErrorKind::Input, "config.punctures[]: need point and weight");
            pts.emplace_back(parse_vec3(e["point"], "config.punctures[].point"));
            w.push_back(e["weight"].get<double>());
        }
        if (!pts.empty())
            cfg.punctures = std::make_shared<PunctureSet>(std::move(pts), std::move(w));
    }
    if (j.contains("n")) {
        if (!j["n"].is_number_integer()) fail(ErrorKind::Input, "config: n must be an integer");
        cfg.n = j["n"].get<int>();
    }
    if (j.contains("n_values")) {
        if (!j["n_values"].is_array())
            fail(ErrorKind::Input, "config: n_values must be an array of integers");
        for (const auto& e : j["n_values"]) {
            if (!e.is_number_integer())
                fail(ErrorKind::Input, "config: n_values must be an array of integers");
            cfg.n_values.push_back(e.get<int>());
        }
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        reject_unknown(s, {"tol_rel", "max_iters", "line_search_shrink"}, "config.solver");
        if (s.contains("tol_rel")) cfg.solver.tol_rel = s["tol_rel"].get<double>();
        if (s.contains("max_iters")) cfg.solver.max_iters = s["max_iters"].get<int>();
        if (s.contains("line_search_shrink"))
            cfg.solver.line_search_shrink = s["line_search_shrink"].get<double>();
    }
    if (j.contains("tolerances")) {
        if (!j["tolerances"].is_object())
            fail(ErrorKind::Input, "config: tolerances must be an object");
        for (const auto& [key, val] : j["tolerances"].items()) {
            if (!val.is_number())
                fail(ErrorKind::Input, "config.tolerances." + key + ": expected a number");
            cfg.tolerances[key] = val.get<double>();
        }
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("export_obj")) cfg.export_mesh = j["export_obj"].get<bool>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<unsigned>();

    if (cfg.punctures && cfg.n == 0 && cfg.n_values.empty())
        fail(ErrorKind::Input, "config: punctures given but neither n nor n_values");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(load_json_file(path));
}

std::vector<UnitVector> load_points(const std::string& path) {
    json j = load_json_file(path);
    reject_unknown(j, {"points"}, "points file");
    if (!j.contains("points") || !j["points"].is_array() || j["points"].size() < 2)
        fail(ErrorKind::Input, "points file: need an array of at least 2 points");
    std::vector<UnitVector> pts;
    for (const auto& e : j["points"])
        pts.emplace_back(parse_vec3(e, "points file entry"));
    return pts;
}

json body_to_json(const ConvexPolytope& P) {
    json j;
    json vs = json::array();
    for (const auto& v : P.vertices) vs.push_back({v.x(), v.y(), v.z()});
    j["vertices"] = vs;
    json fs = json::array();
    for (std::size_t i = 0; i < P.facets.size(); ++i) {
        const Facet& f = P.facets[i];
        const Vec3& n = P.facet_normals[i];
        fs.push_back({{"normal", {n.x(), n.y(), n.z()}},
                      {"offset", f.plane_offset},
                      {"loop", f.vertex_loop}});
    }
    j["facets"] = fs;
    return j;
}

ConvexPolytope body_from_json(const json& j) {
    reject_unknown(j, {"vertices", "facets"}, "body");
    if (!j.contains("vertices") || !j.contains("facets"))
        fail(ErrorKind::Input, "body: need vertices and facets");
    ConvexPolytope P;
    for (const auto& e : j["vertices"]) P.vertices.push_back(parse_vec3(e, "body.vertices"));
    int idx = 0;
    for (const auto& e : j["facets"]) {
        reject_unknown(e, {"normal", "offset", "loop"}, "body.facets[]");
        Facet f;
        f.normal_index = idx++;
        f.plane_offset = e.at("offset").get<double>();
        for (const auto& v : e.at("loop")) {
            const int vi = v.get<int>();
            if (vi < 0 || vi >= static_cast<int>(P.vertices.size()))
                fail(ErrorKind::Input, "body: facet loop index out of range");
            f.vertex_loop.push_back(vi);
        }
        const Vec3 n = parse_vec3(e.at("normal"), "body.facets[].normal");
        P.facet_normals.push_back(n);
        // Area from the loop (shoelace about its centroid).
        if (f.vertex_loop.size() >= 3) {
            Vec3 c = Vec3::Zero();
            for (int v : f.vertex_loop) c += P.vertices[v];
            c /= static_cast<double>(f.vertex_loop.size());
            double tw = 0;
            const std::size_t L = f.vertex_loop.size();
            for (std::size_t k = 0; k < L; ++k)
                tw += (P.vertices[f.vertex_loop[k]] - c)
                          .cross(P.vertices[f.vertex_loop[(k + 1) % L]] - c)
                          .dot(n);
            f.area = 0.5 * std::abs(tw);
        }
        P.facets.push_back(std::move(f));
    }
    return P;
}

void export_obj(const ConvexPolytope& P, const std::string& path) {
    // Deterministic ordering: vertices sorted lexicographically, then indexed.
    std::vector<int> order(P.vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Vec3 &u = P.vertices[a], &v = P.vertices[b];
        if (u.x() != v.x()) return u.x() < v.x();
        if (u.y() != v.y()) return u.y() < v.y();
        return u.z() < v.z();
    });
    std::vector<int> rank(P.vertices.size());
    for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = static_cast<int>(k);

    std::ostringstream out;
    for (int v : order)
        out << "v " << fmt17(P.vertices[v].x()) << ' ' << fmt17(P.vertices[v].y()) << ' '
            << fmt17(P.vertices[v].z()) << '\n';
    for (const auto& f : P.facets) {
        if (f.vertex_loop.size() < 3) continue;
        std::vector<int> loop;
        for (int v : f.vertex_loop) loop.push_back(rank[v]);
        // Rotate so the smallest index leads (stable output for equal bodies).
        const auto lead = std::min_element(loop.begin(), loop.end());
        std::rotate(loop.begin(), lead, loop.end());
        out << 'f';
        for (int v : loop) out << ' ' << v + 1;
        out << '\n';
    }
    write_text(path, out.str());
}

ConvexPolytope import_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Input, "cannot open " + path);
    ConvexPolytope P;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) fail(ErrorKind::Input, path + ": malformed vertex line");
            P.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            Facet f;
            int vi;
            while (ls >> vi) {
                if (vi < 1 || vi > static_cast<int>(P.vertices.size()))
                    fail(ErrorKind::Input, path + ": face index out of range");
                f.vertex_loop.push_back(vi - 1);
            }
            if (f.vertex_loop.size() < 3)
                fail(ErrorKind::Input, path + ": face with fewer than 3 vertices");
            f.normal_index = static_cast<int>(P.facets.size());
            // Newell normal and plane data from the loop.
            Vec3 n = Vec3::Zero(), c = Vec3::Zero();
            const std::size_t L = f.vertex_loop.size();
            for (std::size_t k = 0; k < L; ++k) {
                const Vec3 &a = P.vertices[f.vertex_loop[k]],
                           &b = P.vertices[f.vertex_loop[(k + 1) % L]];
                n += a.cross(b);
                c += a;
            }
            c /= static_cast<double>(L);
            f.area = 0.5 * n.norm();
            if (n.norm() > 0) n.normalize();
            f.plane_offset = n.dot(c);
            P.facet_normals.push_back(n);
            P.facets.push_back(std::move(f));
        } else if (!tag.empty() && tag[0] != '#') {
            fail(ErrorKind::Input, path + ": unsupported OBJ element '" + tag + "'");
        }
    }
    return P;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            fail(ErrorKind::Input, "write_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << fmt17(row[i]) << (i + 1 < row.size() ? "," : "");
        out << '\n';
    }
    write_text(path, out.str());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Resource, "cannot write " + path);
    out << content;
    if (!out) fail(ErrorKind::Resource, "write failed for " + path);
}

}  // namespace minksurf
