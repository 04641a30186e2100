#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bifree/errors.hpp"
#include "bifree/measure.hpp"

namespace bifree::io {

using nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

/// Schema: {"atoms":[{"x":..., "m":...}], "density":[{"x":..., "w":...}]}.
inline Measure1D measure1d_from_json(const json& j, bool renormalize = false) {
    try {
        std::vector<Atom1D> atoms;
        std::vector<QuadNode> density;
        for (const auto& a : j.value("atoms", json::array()))
            atoms.push_back({a.at("x").get<double>(), a.at("m").get<double>()});
        for (const auto& q : j.value("density", json::array()))
            density.push_back({q.at("x").get<double>(), q.at("w").get<double>()});
        return Measure1D(std::move(atoms), std::move(density), renormalize);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("measure schema: ") + e.what());
    }
}

inline json to_json(const Measure1D& m) {
    json atoms = json::array();
    for (const auto& a : m.atoms()) atoms.push_back({{"x", a.location}, {"m", a.mass}});
    json density = json::array();
    for (const auto& q : m.density()) density.push_back({{"x", q.x}, {"w", q.w}});
    json j = {{"atoms", atoms}};
    if (!density.empty()) j["density"] = density;
    return j;
}

/// Schema: {"atoms":[{"x":..., "y":..., "m":...}],
///          "grid":{"nodes":[{"x":..., "y":..., "w":...}]}}.
inline PlanarMeasure planar_from_json(const json& j, bool renormalize = false) {
    try {
        std::vector<PlanarAtom> atoms;
        std::vector<GridNode> grid;
        for (const auto& a : j.value("atoms", json::array()))
            atoms.push_back(
                {a.at("x").get<double>(), a.at("y").get<double>(), a.at("m").get<double>()});
        if (j.contains("grid"))
            for (const auto& g : j.at("grid").value("nodes", json::array()))
                grid.push_back(
                    {g.at("x").get<double>(), g.at("y").get<double>(), g.at("w").get<double>()});
        return PlanarMeasure(std::move(atoms), std::move(grid), renormalize);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("planar measure schema: ") + e.what());
    }
}

inline json to_json(const PlanarMeasure& m) {
    json atoms = json::array();
    for (const auto& a : m.atoms()) atoms.push_back({{"x", a.x}, {"y", a.y}, {"m", a.mass}});
    json j = {{"atoms", atoms}};
    if (!m.grid().empty()) {
        json nodes = json::array();
        for (const auto& g : m.grid()) nodes.push_back({{"x", g.x}, {"y", g.y}, {"w", g.w}});
        j["grid"] = {{"nodes", nodes}};
    }
    return j;
}

/// Whether a measure object describes a planar measure (atoms carry "y").
inline bool is_planar(const json& j) {
    if (j.contains("grid")) return true;
    const auto& atoms = j.value("atoms", json::array());
    return !atoms.empty() && atoms.front().contains("y");
}

/// Paired-measure schema {"phi": <measure>, "psi": <measure>} used by the
/// two-state convolutions.
inline std::pair<json, json> split_pair(const json& j) {
    if (!j.contains("phi") || !j.contains("psi"))
        throw SchemaError("paired measure requires \"phi\" and \"psi\" members");
    return {j.at("phi"), j.at("psi")};
}

} // namespace bifree::io
