#pragma once

// JSON persistence of frameworks and query results (nlohmann::json).

#include "json.hpp"

#include "metamodel/analytics.hpp"
#include "metamodel/framework.hpp"
#include "metamodel/search.hpp"

namespace metamodel {

using nlohmann::json;

inline json ids_json(std::span<const ElementId> xs) {
    json a = json::array();
    for (auto x : xs) a.push_back(x.value);
    return a;
}

inline std::vector<ElementId> ids_from_json(const json& a) {
    std::vector<ElementId> out;
    for (const auto& v : a) out.push_back(ElementId{v.get<std::int64_t>()});
    return out;
}

inline json ratio_json(Ratio r) { return {{"num", r.num}, {"den", r.den}}; }

inline json feature_value_json(const FeatureValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

inline json to_json(const Framework& fw) {
    json doc;
    doc["universe_name"] = fw.universe()->name();
    doc["universe"] = ids_json(fw.universe()->elements());
    json feats = json::array();
    for (const auto& f : fw.features())
        feats.push_back({{"id", f.id}, {"kind", to_string(f.kind)}, {"plugin", f.plugin}, {"partial", f.partial}});
    doc["features"] = feats;
    json elems = json::array();
    for (const auto& [x, fv] : fw.element_features()) {
        json values = json::object();
        for (const auto& [k, v] : fv) values[k] = feature_value_json(v);
        elems.push_back({{"id", x.value}, {"features", values}});
    }
    doc["elements"] = elems;
    json env = json::array();
    for (const auto& [id, d] : fw.datasets()) env.push_back({{"id", id}, {"members", ids_json(d.members())}});
    doc["environment"] = env;
    json models = json::array();
    for (const auto& [id, m] : fw.base_models()) {
        json j = {{"id", id}, {"description", m.description}, {"required_features", m.required_features}};
        if (!m.plugin.empty()) j["plugin"] = m.plugin;
        if (!m.predicate_dsl.empty()) j["predicate_dsl"] = m.predicate_dsl;
        models.push_back(j);
    }
    doc["base_models"] = models;
    json pairs = json::array();
    for (const auto& p : fw.pairings())
        pairs.push_back({{"id", p.id},
                         {"model_id", p.model_id},
                         {"dataset", ids_json(fw.dataset(p.id).members())},
                         {"model", unparse(p.model)},
                         {"dummy", p.dummy},
                         {"unverified", p.unverified}});
    doc["pairings"] = pairs;
    doc["metadata"] = fw.metadata();
    return doc;
}

/// Rebuilds a framework; extractors and predicates are resolved through
/// `reg`, so every plugin named in the document must be registered.
inline Framework framework_from_json(const json& doc, const PluginRegistry& reg) {
    try {
        Framework fw(doc.value("universe_name", std::string("universe")), ids_from_json(doc.at("universe")));
        for (const auto& f : doc.value("features", json::array())) {
            FeatureDef def;
            def.id = f.at("id").get<std::string>();
            def.kind = f.value("kind", std::string("numeric")) == "numeric" ? FeatureKind::Numeric
                                                                            : FeatureKind::Categorical;
            def.plugin = f.at("plugin").get<std::string>();
            def.partial = f.value("partial", false);
            def.extractor = reg.extractor(def.plugin);
            fw.restore_feature_def(std::move(def));
        }
        for (const auto& e : doc.value("elements", json::array())) {
            FeatureVector fv;
            for (const auto& [k, v] : e.at("features").items()) {
                if (v.is_number()) fv[k] = v.get<double>();
                else fv[k] = v.get<std::string>();
            }
            fw.restore_features(ElementId{e.at("id").get<std::int64_t>()}, std::move(fv));
        }
        for (const auto& d : doc.value("environment", json::array()))
            fw.restore_dataset(Dataset(d.at("id").get<std::string>(), fw.universe(), ids_from_json(d.at("members"))));
        // Composite predicates refer to other base models, so load plugin ones first.
        std::vector<json> deferred;
        for (const auto& m : doc.value("base_models", json::array())) {
            if (m.contains("predicate_dsl") && !m.contains("plugin")) {
                deferred.push_back(m);
                continue;
            }
            std::string plugin = m.at("plugin").get<std::string>();
            fw.restore_base_model({m.at("id").get<std::string>(), m.value("description", std::string()),
                                   m.value("required_features", std::vector<std::string>{}), plugin, "",
                                   reg.predicate(plugin)});
        }
        for (std::size_t pass = 0; !deferred.empty(); ++pass) {
            if (pass > 64) throw Error("composite base models refer to each other in a cycle");
            std::vector<json> later;
            for (const auto& m : deferred) {
                std::string dsl = m.at("predicate_dsl").get<std::string>();
                bool ready = true;
                for (const auto& name : leaf_names(parse_model(dsl)))
                    if (!fw.base_models().count(name)) ready = false;
                if (!ready) {
                    later.push_back(m);
                    continue;
                }
                fw.restore_base_model({m.at("id").get<std::string>(), m.value("description", std::string()),
                                       m.value("required_features", std::vector<std::string>{}), "", dsl,
                                       fw.compile_dsl_predicate(dsl)});
            }
            if (later.size() == deferred.size()) throw Error("composite base model refers to an unknown model");
            deferred = std::move(later);
        }
        for (const auto& p : doc.value("pairings", json::array())) {
            std::string id = p.at("id").get<std::string>();
            Dataset members(id, fw.universe(), ids_from_json(p.at("dataset")));
            if (auto it = fw.datasets().find(id); it != fw.datasets().end()) {
                if (!(it->second == members)) throw Error("pairing '" + id + "' disagrees with its environment dataset");
            } else {
                fw.restore_dataset(members);
            }
            fw.restore_pairing({id, p.at("model_id").get<std::string>(), parse_model(p.at("model").get<std::string>()),
                                p.value("dummy", false), p.value("unverified", false)});
        }
        const json meta = doc.value("metadata", json::object());
        for (const auto& [k, v] : meta.items()) fw.set_metadata(k, v.get<std::string>());
        for (const auto& x : fw.environment().members())
            if (!fw.element_features().count(x))
                throw Error("element " + to_string(x) + " has no stored feature vector");
        fw.check_consistency();
        return fw;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed framework document: ") + e.what());
    }
}

inline json to_json(const MatchResult& r) {
    json b = json::object();
    for (const auto& [k, v] : r.bindings) b[k] = v;
    return {{"expr", r.text},
            {"dual_model", r.dual_text},
            {"lambda", ratio_json(r.lambda)},
            {"exact", r.exact},
            {"bindings", b}};
}

inline json results_json(const std::vector<MatchResult>& results) {
    json a = json::array();
    for (const auto& r : results) a.push_back(to_json(r));
    return a;
}

inline json to_json(const SearchReport& rep) {
    json j;
    j["results"] = results_json(rep.results);
    j["best"] = rep.best ? ratio_json(*rep.best) : json(nullptr);
    j["co_optimal"] = rep.co_optimal;
    j["evaluated"] = rep.evaluated;
    j["warnings"] = rep.warnings;
    j["target"] = ids_json(rep.target);
    if (!rep.per_dataset.empty()) {
        json pd = json::array();
        for (const auto& [id, r] : rep.per_dataset) pd.push_back({{"dataset", id}, {"lambda", ratio_json(r)}});
        j["per_dataset"] = pd;
    }
    return j;
}

inline json to_json(const BipartiteGraph& g) {
    json edges = json::array();
    for (auto [i, j] : g.edges) edges.push_back({g.elements[i].value, g.pairings[j]});
    return {{"elements", ids_json(g.elements)}, {"pairings", g.pairings}, {"weights", g.weights}, {"edges", edges}};
}

inline json to_json(const ConnectionStats& s) {
    json hist = json::object();
    for (auto [n, c] : s.histogram) hist[std::to_string(n)] = c;
    return {{"histogram", hist}, {"mean", ratio_json(s.mean)}, {"mean_value", s.mean.value()},
            {"generality", s.generality}};
}

inline json to_json(const PerturbationReport& r) {
    json groups = json::array();
    for (const auto& [sig, n] : r.groups) groups.push_back({{"signature", sig}, {"outcomes", n}});
    return {{"operator", to_string(r.op)},
            {"changes", r.changes},
            {"weighting", "uniform over change instances"},
            {"groups", groups},
            {"entropy_bits", r.entropy},
            {"malleability", r.value}};
}

inline json to_json(const HierarchyNode& n) {
    json children = json::array();
    for (const auto& c : n.children) children.push_back(to_json(c));
    return {{"h", n.level}, {"set", n.set_label}, {"model", n.model_label}, {"children", children}};
}

}  // namespace metamodel
