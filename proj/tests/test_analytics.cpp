#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "metamodel/analytics.hpp"
#include "metamodel/lattice.hpp"
#include "metamodel/numbers.hpp"

using namespace metamodel;

namespace {

// Outcome groups computed by hand-rolled degree counting over every change.
std::map<std::string, std::size_t> edge_removal_oracle(std::size_t n, std::vector<std::pair<int, int>> edges) {
    std::map<std::string, std::size_t> groups;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        std::vector<int> deg(n, 0);
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (e != k) ++deg[edges[e].first], ++deg[edges[e].second];
        std::sort(deg.begin(), deg.end());
        std::string sig = "[";
        for (std::size_t i = 0; i < deg.size(); ++i) sig += (i ? "," : "") + std::to_string(deg[i]);
        ++groups[sig + "]"];
    }
    return groups;
}

double entropy_bits(const std::map<std::string, std::size_t>& groups) {
    double total = 0, h = 0;
    for (const auto& [s, c] : groups) total += static_cast<double>(c);
    for (const auto& [s, c] : groups) h -= c / total * std::log2(c / total);
    return h;
}

}  // namespace

TEST(Malleability, ClosedForms) {
    EXPECT_DOUBLE_EQ(malleability({1.0}), 1.0);
    EXPECT_NEAR(malleability({0.5, 0.5}), std::exp(1.0), 1e-12);
    for (int D : {2, 4, 8}) {
        std::vector<double> p(D, 1.0 / D);
        EXPECT_NEAR(malleability(p), std::exp(std::log2(D)), 1e-12);
    }
    EXPECT_DOUBLE_EQ(malleability({1.0, 0.0}), 1.0);
}

TEST(Malleability, RejectsInvalidDistributions) {
    EXPECT_THROW(malleability({}), Error);
    EXPECT_THROW(malleability({0.5, 0.4}), Error);
    EXPECT_THROW(malleability({1.5, -0.5}), Error);
    EXPECT_NO_THROW(malleability({0.5, 0.5 + 5e-10}));
}

TEST(Malleability, IncreasesWithOutcomeCount) {
    double prev = 0;
    for (int D = 1; D <= 20; ++D) {
        double m = malleability(std::vector<double>(D, 1.0 / D));
        EXPECT_GT(m, prev);
        EXPECT_GE(m, 1.0);
        prev = m;
    }
}

TEST(Perturbation, StarAndPath) {
    auto star = perturbation_malleability(Graph::make(4, {{0, 1}, {0, 2}, {0, 3}}), ChangeOperator::EdgeRemoval);
    EXPECT_EQ(star.changes, 3U);
    EXPECT_EQ(star.groups.size(), 1U);
    EXPECT_DOUBLE_EQ(star.value, 1.0);

    auto path = perturbation_malleability(Graph::make(3, {{0, 1}, {1, 2}}), ChangeOperator::EdgeRemoval);
    EXPECT_EQ(path.changes, 2U);
    EXPECT_EQ(path.groups.size(), 1U);
    EXPECT_EQ(path.groups[0].first, "[0,1,1]");
    EXPECT_DOUBLE_EQ(path.value, 1.0);
}

TEST(Perturbation, TriangleWithPendantMatchesOracle) {
    std::vector<std::pair<int, int>> edges{{0, 1}, {0, 2}, {1, 2}, {0, 3}};
    auto oracle = edge_removal_oracle(4, edges);
    auto rep = perturbation_malleability(Graph::make(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}}), ChangeOperator::EdgeRemoval);
    std::map<std::string, std::size_t> got(rep.groups.begin(), rep.groups.end());
    EXPECT_EQ(got, oracle);
    EXPECT_NEAR(rep.value, std::exp(entropy_bits(oracle)), 1e-12);
    EXPECT_NEAR(rep.value, std::exp(1.5), 1e-12);
}

TEST(Perturbation, OtherOperators) {
    auto path = Graph::make(3, {{0, 1}, {1, 2}});
    auto add = perturbation_malleability(path, ChangeOperator::EdgeAddition);
    EXPECT_EQ(add.changes, 1U);
    auto rm = perturbation_malleability(path, ChangeOperator::NodeRemoval);
    EXPECT_EQ(rm.changes, 3U);
    EXPECT_EQ(rm.groups.size(), 2U);  // ends leave one edge, the middle leaves two isolates
    EXPECT_THROW(perturbation_malleability(Graph::make(2, {{0, 1}}), ChangeOperator::EdgeAddition), Error);
    EXPECT_THROW(perturbation_malleability(Graph::make(3, {}), ChangeOperator::EdgeRemoval), Error);
    EXPECT_THROW(Graph::make(2, {{0, 0}}), Error);

    auto custom = perturbation_malleability(path, ChangeOperator::NodeRemoval,
                                            [](const Graph& g) { return std::to_string(g.edges.size()); });
    EXPECT_EQ(custom.groups.size(), 2U);
}

TEST(Bipartite, CountsMatchDatasetSizes) {
    auto fw = numbers::build_divisibility_framework(2, 20);
    auto g = export_bipartite(fw);
    std::size_t total = 0;
    for (const auto& p : fw.pairings()) total += fw.dataset(p.id).size();
    EXPECT_EQ(g.edges.size(), total);
    auto s = connection_stats(g);
    EXPECT_EQ(s.mean, Ratio(total, fw.environment().size()));
    // 12 lies in w2, w3, w4, w6, w12.
    auto i12 = std::find(g.elements.begin(), g.elements.end(), ElementId{12}) - g.elements.begin();
    EXPECT_EQ(s.per_element[static_cast<std::size_t>(i12)], 5U);
    EXPECT_EQ(s.generality[0], 10U);
    EXPECT_EQ(bipartite_csv(g).substr(0, 23), "element_id,pairing_id\n2");
}

TEST(Bipartite, DegreeOneFramework) {
    Framework fw("u", id_range(1, 4));
    PluginRegistry reg;
    register_generic_plugins(reg);
    fw.register_feature({"value", FeatureKind::Numeric, "generic.value", reg.extractor("generic.value"), false});
    fw.add_base_model({"odd", "", {"value"}, "generic.mod:2,1", "", reg.predicate("generic.mod:2,1")});
    fw.add_base_model({"even", "", {"value"}, "generic.mod:2,0", "", reg.predicate("generic.mod:2,0")});
    fw.add_dataset("w_odd", ids({1, 3}));
    fw.add_dataset("w_even", ids({2, 4}));
    fw.pair("w_odd", ModelExpr::leaf("odd"));
    fw.pair("w_even", ModelExpr::leaf("even"));
    auto s = connection_stats(export_bipartite(fw));
    EXPECT_EQ(s.mean, Ratio(1, 1));
    EXPECT_EQ(s.histogram, (std::map<std::size_t, std::size_t>{{1, 4}}));
}

TEST(Bipartite, LatticeMeanAgreesWithPredicateSweep) {
    auto fw = lattice::build_lattice_framework(3).framework;
    std::size_t hits = 0;
    for (const auto& [x, fv] : fw.element_features())
        for (const auto& [id, m] : fw.base_models()) hits += m.predicate(fv);
    auto s = connection_stats(export_bipartite(fw));
    EXPECT_EQ(s.mean, Ratio(hits, 512));
}

TEST(Hierarchy, LevelsAndDualLabels) {
    auto fw = numbers::build_divisibility_framework(2, 20);
    auto leaf = hierarchy_tree(parse_set("w2"), &fw);
    EXPECT_EQ(leaf.level, 0);
    EXPECT_TRUE(leaf.children.empty());

    auto t = hierarchy_tree(parse_model("m2 | (m3 & m5)"), &fw);
    EXPECT_EQ(t.level, 0);
    ASSERT_EQ(t.children.size(), 2U);
    EXPECT_EQ(t.children[1].level, 1);
    ASSERT_EQ(t.children[1].children.size(), 2U);
    EXPECT_EQ(t.children[1].children[0].level, 2);
    EXPECT_EQ(t.children[1].model_label, "m3 & m5");

    std::function<void(const HierarchyNode&)> check = [&](const HierarchyNode& n) {
        auto set = eval_set(parse_set(n.set_label), fw);
        auto ext = extension(parse_model(n.model_label), fw);
        EXPECT_EQ(set.members().size(), ext.members().size());
        EXPECT_TRUE(std::equal(set.members().begin(), set.members().end(), ext.members().begin()));
        for (const auto& c : n.children) check(c);
    };
    check(hierarchy_tree(parse_set("w2 | (w3 & ~w5)"), &fw));
    EXPECT_NE(render_hierarchy(t).find("  h=1"), std::string::npos);
}
