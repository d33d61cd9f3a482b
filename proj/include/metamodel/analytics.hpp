#pragma once

// Introspection: the element/model bipartite network, association counts,
// expression hierarchies and the malleability index.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "metamodel/framework.hpp"

namespace metamodel {

struct BipartiteGraph {
    std::vector<ElementId> elements;
    std::vector<std::string> pairings;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // (element index, pairing index)
    std::vector<std::size_t> weights;                        // per pairing: dataset size
};

/// One edge per (element, pairing) with the element satisfying the pairing's
/// model, elements ascending, pairings in registration order.
inline BipartiteGraph export_bipartite(const Framework& fw) {
    BipartiteGraph g;
    Evaluator ev(fw);
    g.elements.assign(ev.elements().begin(), ev.elements().end());
    std::vector<IndexSet> ext;
    for (const auto& p : fw.pairings()) {
        g.pairings.push_back(p.id);
        ext.push_back(ev.model_leaf(p.model_id));
        g.weights.push_back(ext.back().count());
    }
    for (std::size_t i = 0; i < g.elements.size(); ++i)
        for (std::size_t j = 0; j < ext.size(); ++j)
            if (ext[j].test(i)) g.edges.emplace_back(i, j);
    return g;
}

inline std::string bipartite_csv(const BipartiteGraph& g) {
    std::string out = "element_id,pairing_id\n";
    for (auto [i, j] : g.edges) out += to_string(g.elements[i]) + "," + g.pairings[j] + "\n";
    return out;
}

struct ConnectionStats {
    std::vector<std::size_t> per_element;          // n for each element, in graph order
    std::map<std::size_t, std::size_t> histogram;  // n -> number of elements
    Ratio mean{0, 1};
    std::vector<std::size_t> generality;           // in-degree per pairing
};

inline ConnectionStats connection_stats(const BipartiteGraph& g) {
    ConnectionStats s;
    s.per_element.assign(g.elements.size(), 0);
    s.generality.assign(g.pairings.size(), 0);
    for (auto [i, j] : g.edges) {
        ++s.per_element[i];
        ++s.generality[j];
    }
    for (auto n : s.per_element) ++s.histogram[n];
    if (!g.elements.empty()) s.mean = Ratio{g.edges.size(), g.elements.size()};
    return s;
}

/// e raised to the base-2 entropy of `probs`.
inline double malleability(const std::vector<double>& probs) {
    if (probs.empty()) throw Error("malleability needs at least one probability");
    double sum = 0, eta = 0;
    for (double p : probs) {
        if (!(p >= 0) || p > 1 + 1e-12) throw Error("probabilities must lie in [0, 1]");
        sum += p;
        if (p > 0) eta -= p * std::log2(p);
    }
    if (std::abs(sum - 1) > 1e-9) throw Error("probabilities must sum to 1");
    return std::exp(eta);
}

// -- perturbation ----------------------------------------------------------------

/// Simple undirected graph on nodes 0..n-1; edges kept as sorted (u < v) pairs.
struct Graph {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    static Graph make(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
        for (auto& [u, v] : edges) {
            if (u == v || u >= n || v >= n) throw Error("invalid edge in graph");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        return {n, std::move(edges)};
    }

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> d(n, 0);
        for (auto [u, v] : edges) ++d[u], ++d[v];
        return d;
    }
};

enum class ChangeOperator { EdgeRemoval, EdgeAddition, NodeRemoval };

inline std::string_view to_string(ChangeOperator c) {
    switch (c) {
        case ChangeOperator::EdgeRemoval: return "edge-removal";
        case ChangeOperator::EdgeAddition: return "edge-addition";
        case ChangeOperator::NodeRemoval: return "node-removal";
    }
    return "";
}

using Signature = std::function<std::string(const Graph&)>;

/// Default signature: the sorted degree sequence.
inline std::string degree_signature(const Graph& g) {
    auto d = g.degrees();
    std::sort(d.begin(), d.end());
    std::string s;
    for (auto x : d) s += (s.empty() ? "" : ",") + std::to_string(x);
    return "[" + s + "]";
}

inline std::vector<Graph> single_changes(const Graph& g, ChangeOperator op) {
    std::vector<Graph> out;
    switch (op) {
        case ChangeOperator::EdgeRemoval:
            for (std::size_t k = 0; k < g.edges.size(); ++k) {
                auto e = g.edges;
                e.erase(e.begin() + static_cast<std::ptrdiff_t>(k));
                out.push_back({g.n, std::move(e)});
            }
            break;
        case ChangeOperator::EdgeAddition:
            for (std::size_t u = 0; u < g.n; ++u)
                for (std::size_t v = u + 1; v < g.n; ++v)
                    if (!std::binary_search(g.edges.begin(), g.edges.end(), std::pair{u, v})) {
                        auto e = g.edges;
                        e.emplace_back(u, v);
                        out.push_back(Graph::make(g.n, std::move(e)));
                    }
            break;
        case ChangeOperator::NodeRemoval:
            for (std::size_t k = 0; k < g.n; ++k) {
                std::vector<std::pair<std::size_t, std::size_t>> e;
                for (auto [u, v] : g.edges)
                    if (u != k && v != k) e.emplace_back(u - (u > k), v - (v > k));
                out.push_back(Graph::make(g.n - 1, std::move(e)));
            }
            break;
    }
    return out;
}

struct PerturbationReport {
    ChangeOperator op = ChangeOperator::EdgeRemoval;
    std::size_t changes = 0;
    std::vector<std::pair<std::string, std::size_t>> groups;  // signature -> outcomes, by first appearance
    double entropy = 0;
    double value = 1;
};

/// Applies every single change, groups the outcomes by signature and weighs
/// each change instance equally.
inline PerturbationReport perturbation_malleability(const Graph& g, ChangeOperator op,
                                                    const Signature& signature = degree_signature) {
    auto outcomes = single_changes(g, op);
    if (outcomes.empty()) throw Error("no applicable " + std::string(to_string(op)) + " change");
    PerturbationReport r;
    r.op = op;
    r.changes = outcomes.size();
    for (const auto& o : outcomes) {
        auto sig = signature(o);
        auto it = std::find_if(r.groups.begin(), r.groups.end(), [&](const auto& gr) { return gr.first == sig; });
        if (it == r.groups.end()) r.groups.emplace_back(sig, 1);
        else ++it->second;
    }
    std::vector<double> probs;
    for (const auto& [sig, n] : r.groups) probs.push_back(static_cast<double>(n) / static_cast<double>(r.changes));
    r.value = malleability(probs);
    r.entropy = std::log(r.value);
    return r;
}

// -- hierarchy --------------------------------------------------------------------

/// Expression tree with levels counted from the root (h = 0), each node
/// labeled in the set domain and in the model domain.
inline HierarchyNode hierarchy_tree(const SetExpr& e, const Framework* fw = nullptr, int level = 0) {
    HierarchyNode n;
    n.level = level;
    n.set_label = unparse(e);
    n.model_label = fw ? render_model(dualize(e), *fw) : unparse(dualize(e));
    if (e.is_negation()) n.children.push_back(hierarchy_tree(e.child(), fw, level + 1));
    if (e.is_binary()) {
        n.children.push_back(hierarchy_tree(e.left(), fw, level + 1));
        n.children.push_back(hierarchy_tree(e.right(), fw, level + 1));
    }
    return n;
}

inline HierarchyNode hierarchy_tree(const ModelExpr& e, const Framework* fw = nullptr) {
    return hierarchy_tree(dualize_inverse(e), fw);
}

inline std::string render_hierarchy(const HierarchyNode& n) {
    std::string out(static_cast<std::size_t>(n.level) * 2, ' ');
    out += "h=" + std::to_string(n.level) + "  " + n.set_label + "  <->  " + n.model_label + "\n";
    for (const auto& c : n.children) out += render_hierarchy(c);
    return out;
}

}  // namespace metamodel
