#pragma once

// Umbrella header plus file-level load/save with the bundled plugin families.

#include <fstream>
#include <sstream>

#include "metamodel/analytics.hpp"
#include "metamodel/framework.hpp"
#include "metamodel/json_io.hpp"
#include "metamodel/lattice.hpp"
#include "metamodel/numbers.hpp"
#include "metamodel/search.hpp"
#include "metamodel/stochastic.hpp"

namespace metamodel {

inline constexpr std::string_view kVersion = "0.1.0";

/// Generic, divisibility and lattice plugins; the lattice side length comes
/// from the document's "L" metadata (default 3).
inline PluginRegistry standard_registry(const json& doc) {
    int L = 3;
    if (doc.contains("metadata") && doc["metadata"].contains("L"))
        L = std::stoi(doc["metadata"]["L"].get<std::string>());
    PluginRegistry reg;
    numbers::register_plugins(reg);
    lattice::register_plugins(reg, L);
    return reg;
}

inline Framework load_framework(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open framework file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("'" + path + "' is not valid JSON: " + e.what());
    }
    return framework_from_json(doc, standard_registry(doc));
}

inline void save_framework(const Framework& fw, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write framework file '" + path + "'");
    out << to_json(fw).dump(2) << "\n";
}

}  // namespace metamodel
