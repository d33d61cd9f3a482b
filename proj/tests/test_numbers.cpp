#include <gtest/gtest.h>

#include "metamodel/numbers.hpp"

using namespace metamodel;

namespace {

const Framework& fw() {
    static const Framework f = numbers::build_divisibility_framework(2, 20);
    return f;
}

std::vector<std::string> best_texts(const SearchReport& rep) {
    std::vector<std::string> out;
    for (const auto& r : rep.results)
        if (r.lambda == *rep.best) out.push_back(r.text);
    return out;
}

SearchReport query(std::vector<ElementId> target) {
    SearchConfig cfg;
    cfg.top_k = 64;
    return solve_data_driven(std::move(target), fw(), cfg);
}

}  // namespace

TEST(Divisibility, FrameworkShape) {
    EXPECT_EQ(fw().pairings().size(), 19U);
    EXPECT_EQ(fw().dataset("w4").members().size(), 5U);
    EXPECT_EQ(fw().dataset("w11").members().size(), 1U);
    EXPECT_TRUE(fw().sweep().empty());
    EXPECT_THROW(numbers::build_divisibility_framework(1, 20), Error);
}

TEST(Divisibility, MultiplesOfTwoAndThree) {
    auto rep = query(ids({2, 4, 6, 8, 10, 12, 14, 3, 6, 9, 12, 15}));
    EXPECT_EQ(*rep.best, Ratio(10, 13));
    EXPECT_EQ(best_texts(rep), (std::vector<std::string>{"w2 | w3"}));
    EXPECT_EQ(rep.results[0].dual_text, "m2 | m3");
}

TEST(Divisibility, EightToFourteen) {
    auto rep = query(ids({8, 10, 12, 14}));
    EXPECT_EQ(*rep.best, Ratio(1, 2));
    EXPECT_EQ(best_texts(rep), (std::vector<std::string>{"w12 ^ w14", "w12 | w14", "w4 ^ w10"}));
}

TEST(Divisibility, OddNumbers) {
    auto rep = query(ids({1, 3, 5, 7, 9, 11, 13, 15, 17, 19}));
    EXPECT_EQ(*rep.best, Ratio(1, 1));
    EXPECT_EQ(rep.results[0].text, "~w2");
    EXPECT_EQ(rep.co_optimal, 15U);
    ASSERT_FALSE(rep.warnings.empty());
}

TEST(Divisibility, SingleThree) {
    auto rep = query(ids({3}));
    EXPECT_EQ(*rep.best, Ratio(1, 3));
    EXPECT_EQ(best_texts(rep),
              (std::vector<std::string>{"w3 - w2", "w3 - w6", "w3 ^ w6", "w3 & ~w6", "~w2 & w3"}));
}

TEST(Divisibility, MultiplesOfFour) {
    auto rep = query(ids({4, 8, 12, 16, 20}));
    EXPECT_EQ(rep.co_optimal, 24U);
    EXPECT_EQ(rep.results[0].text, "w4");
    EXPECT_EQ(rep.results[1].text, "w2 & w4");
}

TEST(Divisibility, PrimesOptimumDiffersFromPublishedValue) {
    auto rep = query(ids({2, 3, 5, 7, 11, 13, 17, 19}));
    EXPECT_EQ(*rep.best, Ratio(7, 9));
    EXPECT_NE(*rep.best, Ratio(7, 8));
}

TEST(Divisibility, EngineAgreesWithOracleOnEveryCase) {
    auto rows = numbers::run_case_queries(fw());
    ASSERT_EQ(rows.size(), 6U);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.engine_matches_oracle) << r.query.name;
        EXPECT_TRUE(r.missing_published_exprs.empty()) << r.query.name;
    }
    EXPECT_FALSE(rows.back().engine_matches_published);
    auto table = numbers::format_case_table(rows);
    EXPECT_NE(table.find("discrepancy"), std::string::npos);
    EXPECT_EQ(table.find("ERROR"), std::string::npos);
}
