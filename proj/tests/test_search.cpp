#include <gtest/gtest.h>

#include <random>

#include "metamodel/numbers.hpp"
#include "metamodel/search.hpp"

using namespace metamodel;

namespace {

const Framework& numbers_fw() {
    static const Framework fw = numbers::build_divisibility_framework(2, 20);
    return fw;
}

// Five pairings over 2..20: w2, w3, w5, w7, w11.
Framework five() {
    Framework fw = numbers::build_divisibility_framework(2, 20);
    Framework out("numbers", id_range(2, 20));
    for (const auto& f : fw.features()) out.register_feature(f);
    for (std::int64_t r : {2, 3, 5, 7, 11}) {
        auto id = "m" + std::to_string(r);
        out.add_base_model(fw.base_models().at(id));
        auto w = "w" + std::to_string(r);
        auto members = fw.dataset(w).members();
        out.add_dataset(w, std::vector<ElementId>(members.begin(), members.end()));
        out.pair(w, ModelExpr::leaf(id));
    }
    return out;
}

using Bits = std::vector<bool>;

Bits apply_form(Form f, const Bits& a, const Bits& b) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        bool x = a[i], y = b[i];
        switch (f) {
            case Form::And: out[i] = x && y; break;
            case Form::Nand: out[i] = !(x && y); break;
            case Form::NotAAndB:
            case Form::BMinusA: out[i] = !x && y; break;
            case Form::AAndNotB:
            case Form::AMinusB: out[i] = x && !y; break;
            case Form::Or: out[i] = x || y; break;
            case Form::Nor: out[i] = !(x || y); break;
            case Form::NotAOrB: out[i] = !x || y; break;
            case Form::AOrNotB: out[i] = x || !y; break;
            case Form::Xor: out[i] = x != y; break;
            case Form::Xnor: out[i] = x == y; break;
        }
    }
    return out;
}

// Brute-force optimum over the same candidate space, evaluated on plain
// boolean vectors.
std::pair<Ratio, std::size_t> brute_force(const std::vector<Bits>& leaves, const Bits& goal, int depth) {
    Ratio best{0, 1};
    std::size_t count = 0;
    bool goal_empty = std::none_of(goal.begin(), goal.end(), [](bool b) { return b; });
    auto consider = [&](const Bits& v) {
        std::size_t inter = 0, uni = 0;
        bool any = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            inter += v[i] && goal[i];
            uni += v[i] || goal[i];
            any = any || v[i];
        }
        Ratio r = uni == 0 ? Ratio{1, 1} : Ratio{inter, uni};
        if (!any && !goal_empty) r = Ratio{0, 1};
        if (r.num == 0) return;
        if (r > best) best = r, count = 0;
        if (r == best) ++count;
    };
    for (const auto& a : leaves) {
        consider(a);
        Bits c(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) c[i] = !a[i];
        consider(c);
    }
    std::vector<Bits> level;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j)
            for (auto f : kCatalog) {
                level.push_back(apply_form(f, leaves[i], leaves[j]));
                consider(level.back());
            }
    if (depth >= 2)
        for (const auto& e : level)
            for (const auto& l : leaves)
                for (auto f : kCatalog) consider(apply_form(f, e, l));
    return {best, count};
}

}  // namespace

TEST(Candidates, CountAndOrder) {
    const auto& fw = numbers_fw();
    std::size_t n = fw.pairings().size();
    ASSERT_EQ(n, 19U);
    auto c = candidates(fw);
    EXPECT_EQ(c.size(), 2 * n + n * (n - 1) / 2 * 12);
    EXPECT_EQ(unparse(c[0]), "w2");
    EXPECT_EQ(unparse(c[1]), "~w2");
    EXPECT_EQ(unparse(c[2 * n]), "w2 & w3");
    EXPECT_EQ(unparse(c[2 * n + 1]), "~(w2 & w3)");
    EXPECT_EQ(unparse(c[2 * n + 3]), "w3 - w2");

    SearchConfig d2;
    d2.max_depth = 2;
    auto f5 = five();
    std::size_t l1 = 10 * 12;
    EXPECT_EQ(candidates(f5, d2).size(), 10 + l1 + l1 * 5 * 12);
    SearchConfig no_unary;
    no_unary.include_unary = false;
    EXPECT_EQ(candidates(f5, no_unary).size(), l1);
}

TEST(Search, MatchesBruteForceOnRandomTargets) {
    auto fw = five();
    Evaluator ev(fw);
    std::vector<Bits> leaves;
    for (const auto& p : fw.pairings()) {
        auto s = ev.set_leaf(p.id);
        Bits b(ev.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = s.test(i);
        leaves.push_back(b);
    }
    std::mt19937 rng(17);
    for (int depth : {1, 2}) {
        SearchConfig cfg;
        cfg.max_depth = depth;
        for (int t = 0; t < 40; ++t) {
            std::vector<ElementId> target;
            Bits goal(ev.size());
            for (std::size_t i = 0; i < ev.size(); ++i)
                if (rng() % 3 == 0) {
                    target.push_back(ev.elements()[i]);
                    goal[i] = true;
                }
            auto rep = solve_data_driven(target, fw, cfg);
            auto [best, count] = brute_force(leaves, goal, depth);
            if (best.num == 0) {
                EXPECT_FALSE(rep.best && rep.best->num > 0);
                continue;
            }
            ASSERT_TRUE(rep.best);
            EXPECT_EQ(*rep.best, best);
            EXPECT_EQ(rep.co_optimal, count);
            EXPECT_EQ(rep.results.front().lambda, best);
        }
    }
}

TEST(Search, RankingIsSortedAndExactResultsAreKept) {
    SearchConfig cfg;
    cfg.top_k = 3;
    auto rep = solve_data_driven(ids({4, 8, 12, 16, 20}), numbers_fw(), cfg);
    ASSERT_EQ(rep.results.size(), 24U + 3U);
    for (std::size_t i = 1; i < rep.results.size(); ++i)
        EXPECT_FALSE(ranks_before(rep.results[i], rep.results[i - 1]));
    EXPECT_EQ(rep.results[0].text, "w4");
    EXPECT_EQ(rep.results[0].dual_text, "m4");
    EXPECT_TRUE(rep.results[0].exact);
    EXPECT_EQ(rep.results[1].text, "w2 & w4");
    EXPECT_FALSE(rep.results.back().exact);
}

TEST(Search, ThresholdIsStrict) {
    SearchConfig cfg;
    cfg.threshold = Ratio{10, 13};
    auto rep = solve_data_driven(ids({2, 4, 6, 8, 10, 12, 14, 3, 9, 15}), numbers_fw(), cfg);
    EXPECT_TRUE(rep.results.empty());
    EXPECT_FALSE(rep.best);
    cfg.threshold = Ratio{3, 4};
    rep = solve_data_driven(ids({2, 4, 6, 8, 10, 12, 14, 3, 9, 15}), numbers_fw(), cfg);
    ASSERT_EQ(rep.results.size(), 1U);
    EXPECT_EQ(rep.results[0].text, "w2 | w3");
}

TEST(Search, TargetCleaning) {
    auto rep = solve_data_driven(ids({1, 3, 3, 99}), numbers_fw());
    EXPECT_EQ(rep.target, ids({3}));
    ASSERT_EQ(rep.warnings.size(), 2U);
    EXPECT_NE(rep.warnings[0].find("1,99"), std::string::npos);
}

TEST(Search, NewElementsAreIngestedIntoAWorkingCopy) {
    Framework fw("u", id_range(1, 12));
    PluginRegistry reg;
    register_generic_plugins(reg);
    fw.register_feature({"value", FeatureKind::Numeric, "generic.value", reg.extractor("generic.value"), false});
    fw.add_base_model({"m_even", "", {"value"}, "generic.mod:2,0", "", reg.predicate("generic.mod:2,0")});
    fw.add_dataset("w_even", ids({2, 4}));
    fw.pair("w_even", ModelExpr::leaf("m_even"));
    fw.add_dataset("rest", ids({1, 3}));
    auto rep = solve_data_driven(ids({2, 4, 6}), fw);
    EXPECT_EQ(*rep.best, Ratio(1, 1));
    EXPECT_EQ(rep.results[0].text, "w_even");
    EXPECT_FALSE(fw.environment().contains(ElementId{6}));
}

TEST(Search, ModelDrivenScoresEachDataset) {
    auto rep = solve_model_driven(parse_model("m2 & m3"), numbers_fw());
    // w6 and w2 & w3 are both exact; the single leaf has fewer nodes.
    ASSERT_GE(rep.results.size(), 2U);
    EXPECT_EQ(rep.results[0].text, "w6");
    EXPECT_EQ(rep.results[1].text, "w2 & w3");
    EXPECT_TRUE(rep.results[1].exact);
    EXPECT_EQ(rep.per_dataset.size(), 19U);
    EXPECT_EQ(rep.per_dataset[4].first, "w6");
    EXPECT_EQ(rep.per_dataset[4].second, Ratio(1, 1));
}

TEST(Search, Equations) {
    const auto& fw = numbers_fw();
    auto rep = solve_equation("?a & ?b == w6", fw);
    ASSERT_FALSE(rep.results.empty());
    EXPECT_TRUE(rep.results[0].exact);
    EXPECT_EQ(rep.results[0].text, "w2 & w3 == w6");
    EXPECT_EQ(rep.results[0].bindings.at("a"), "w2");
    auto single = solve_equation("?x == m4", fw);
    EXPECT_EQ(single.results[0].text, "w4 == m4");
    EXPECT_THROW(solve_equation("?a & ?b & ?c == w6", fw), Error);
    EXPECT_THROW(solve_equation("w2 == w6", fw), Error);
    EXPECT_THROW(solve_equation("?a == nope", fw), ParseError);
}

TEST(Search, EmptyFrameworkIsAnError) {
    Framework fw("u", id_range(1, 3));
    EXPECT_THROW(solve_data_driven(ids({1}), fw), Error);
    SearchConfig bad;
    bad.max_depth = 0;
    EXPECT_THROW(solve_data_driven(ids({2}), numbers_fw(), bad), Error);
}
