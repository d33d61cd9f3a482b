#pragma once

// Loader for the iris CSV fixture: four numeric columns and a species label.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "metamodel/stochastic.hpp"

namespace metamodel::iris {

struct Row {
    std::array<double, 4> features{};
    std::string species;
};

inline std::vector<Row> load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open iris file '" + path + "'");
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 5) throw Error(path + ":" + std::to_string(lineno) + ": expected 5 columns");
        Row r;
        try {
            for (int k = 0; k < 4; ++k) r.features[k] = std::stod(cells[k]);
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw Error(path + ":" + std::to_string(lineno) + ": non-numeric feature");
        }
        r.species = cells[4];
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("iris file '" + path + "' has no rows");
    return rows;
}

/// One point set per species, in order of first appearance, named w1, w2, ...
/// Feature indices are 1-based.
inline std::vector<stochastic::PointSet> point_sets(const std::vector<Row>& rows, int fx = 2, int fy = 3) {
    if (fx < 1 || fx > 4 || fy < 1 || fy > 4) throw Error("iris feature indices must lie in 1..4");
    std::vector<std::string> species;
    std::vector<stochastic::PointSet> sets;
    for (const auto& r : rows) {
        auto it = std::find(species.begin(), species.end(), r.species);
        std::size_t k = static_cast<std::size_t>(it - species.begin());
        if (it == species.end()) {
            species.push_back(r.species);
            sets.push_back({"w" + std::to_string(species.size()), {}});
        }
        sets[k].points.push_back({r.features[fx - 1], r.features[fy - 1]});
    }
    return sets;
}

inline std::vector<std::string> species_names(const std::vector<Row>& rows) {
    std::vector<std::string> species;
    for (const auto& r : rows)
        if (std::find(species.begin(), species.end(), r.species) == species.end()) species.push_back(r.species);
    return species;
}

}  // namespace metamodel::iris
