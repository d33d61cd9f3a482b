#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "metamodel/index_set.hpp"
#include "metamodel/ops.hpp"
#include "metamodel/sets.hpp"

using namespace metamodel;

namespace {

UniversePtr omega20() { return make_universe("omega", id_range(1, 20)); }

std::set<std::int64_t> as_set(const Dataset& d) {
    std::set<std::int64_t> s;
    for (auto x : d.members()) s.insert(x.value);
    return s;
}

}  // namespace

TEST(Dataset, NormalizesAndRejectsStrays) {
    auto u = omega20();
    Dataset d("d", u, ids({5, 1, 5, 3}));
    EXPECT_EQ(d.size(), 3U);
    EXPECT_EQ(d.members().front(), ElementId{1});
    try {
        Dataset bad("bad", u, ids({1, 21, 30}));
        FAIL() << "expected NotSubset";
    } catch (const NotSubset& e) {
        EXPECT_NE(std::string(e.what()).find("21"), std::string::npos);
    }
}

TEST(Dataset, UniverseMismatch) {
    Dataset a("a", omega20(), ids({1}));
    Dataset b("b", make_universe("other", id_range(1, 5)), ids({1}));
    EXPECT_THROW(set_union(a, b), UniverseMismatch);
    EXPECT_THROW(jaccard(a, b), UniverseMismatch);
}

TEST(Dataset, StructurallyEqualUniversesMix) {
    Dataset a("a", omega20(), ids({1, 2}));
    Dataset b("b", omega20(), ids({2, 3}));
    EXPECT_EQ(intersect(a, b).size(), 1U);
}

TEST(Jaccard, WorkedExamples) {
    auto u = omega20();
    Dataset a("A", u, id_range(1, 7));
    EXPECT_EQ(jaccard(a, Dataset("B", u, id_range(1, 8))), Ratio(7, 8));
    EXPECT_EQ(jaccard(a, Dataset("B", u, ids({1, 2, 3, 5, 7}))), Ratio(5, 7));
    // |A & B| = 2 over |A | B| = 10; the often-quoted 2/7 divides by |A| instead.
    EXPECT_EQ(jaccard(a, Dataset("B", u, ids({1, 5, 10, 12, 20}))), Ratio(1, 5));
}

TEST(Jaccard, EdgeCases) {
    auto u = omega20();
    Dataset e1 = Dataset::empty_of("e1", u), e2 = Dataset::empty_of("e2", u);
    EXPECT_EQ(jaccard(e1, e2), Ratio(1, 1));
    Dataset a("a", u, ids({1, 2}));
    EXPECT_EQ(jaccard(a, e1), Ratio(0, 1));
    EXPECT_EQ(jaccard(a, a), Ratio(1, 1));
}

TEST(Ratio, ReducedAndExactlyOrdered) {
    Ratio r(6, 8);
    EXPECT_EQ(r.num, 3U);
    EXPECT_EQ(r.den, 4U);
    EXPECT_LT(Ratio(1, 3), Ratio(1, 2));
    EXPECT_EQ(Ratio(2, 4), Ratio(1, 2));
    EXPECT_GT(Ratio(10, 13), Ratio(3, 4));
    EXPECT_EQ(to_string(Ratio(10, 13)), "10/13");
}

TEST(SetOps, AgreeWithStdSetOnRandomInputs) {
    auto u = omega20();
    std::mt19937 rng(7);
    std::bernoulli_distribution coin(0.4);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ElementId> xa, xb;
        std::set<std::int64_t> sa, sb;
        for (std::int64_t v = 1; v <= 20; ++v) {
            if (coin(rng)) xa.emplace_back(v), sa.insert(v);
            if (coin(rng)) xb.emplace_back(v), sb.insert(v);
        }
        Dataset a("a", u, xa), b("b", u, xb);
        std::set<std::int64_t> uni, inter, diff, sym;
        std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(uni, uni.end()));
        std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(inter, inter.end()));
        std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(diff, diff.end()));
        std::set_symmetric_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(sym, sym.end()));
        EXPECT_EQ(as_set(set_union(a, b)), uni);
        EXPECT_EQ(as_set(intersect(a, b)), inter);
        EXPECT_EQ(as_set(difference(a, b)), diff);
        EXPECT_EQ(as_set(sym_difference(a, b)), sym);
        auto c = complement(a, Dataset::full("all", u));
        EXPECT_EQ(c.size() + a.size(), 20U);
        auto expect = uni.empty() ? Ratio(1, 1) : Ratio(inter.size(), uni.size());
        EXPECT_EQ(jaccard(a, b), expect);
    }
}

TEST(Ops, TruthTablesMatchNamedOperations) {
    for (bool x : {false, true})
        for (bool y : {false, true}) {
            EXPECT_EQ(ops::apply(ops::kAnd, x, y), x && y);
            EXPECT_EQ(ops::apply(ops::kOr, x, y), x || y);
            EXPECT_EQ(ops::apply(ops::kXor, x, y), x != y);
            EXPECT_EQ(ops::apply(ops::kXnor, x, y), x == y);
            EXPECT_EQ(ops::apply(ops::kAndNot, x, y), x && !y);
            EXPECT_EQ(ops::apply(ops::kNotAnd, x, y), !x && y);
            EXPECT_EQ(ops::apply(ops::kNand, x, y), !(x && y));
            EXPECT_EQ(ops::apply(ops::kNor, x, y), !(x || y));
            EXPECT_EQ(ops::apply(ops::kLeft, x, y), x);
            EXPECT_EQ(ops::apply(ops::kRight, x, y), y);
            EXPECT_FALSE(ops::apply(ops::kFalse, x, y));
            EXPECT_TRUE(ops::apply(ops::kTrue, x, y));
        }
    EXPECT_EQ(ops::function_count(2), 16U);
    EXPECT_EQ(ops::function_count(3), 256U);
    EXPECT_TRUE(ops::is_trivial(ops::kLeft));
    EXPECT_FALSE(ops::is_trivial(ops::kXor));
}

TEST(Ops, FoldIsLeftAssociative) {
    std::vector<bool> v{true, true, false};
    EXPECT_TRUE(ops::fold(ops::kXor, std::vector<bool>{true, false, false}));
    EXPECT_FALSE(ops::fold(ops::kAnd, v));
    // nand(nand(1, 1), 0) = nand(0, 0)
    EXPECT_TRUE(ops::fold(ops::kNand, v));
    EXPECT_THROW(ops::fold(ops::kAnd, std::vector<bool>{}), std::invalid_argument);
}

TEST(IndexSet, ApplyAgreesWithBitwiseOracle) {
    std::mt19937 rng(11);
    for (std::size_t bits : {1U, 63U, 64U, 65U, 130U, 300U}) {
        IndexSet a(bits), b(bits);
        std::vector<bool> va(bits), vb(bits);
        for (std::size_t i = 0; i < bits; ++i) {
            va[i] = rng() & 1;
            vb[i] = rng() & 1;
            a.set(i, va[i]);
            b.set(i, vb[i]);
        }
        for (unsigned code = 0; code < ops::kCount; ++code) {
            auto r = IndexSet::apply(code, a, b);
            std::size_t n = 0;
            for (std::size_t i = 0; i < bits; ++i) {
                bool want = ops::apply(code, va[i], vb[i]);
                ASSERT_EQ(r.test(i), want) << "code " << code << " bit " << i;
                n += want;
            }
            EXPECT_EQ(r.count(), n);
        }
        EXPECT_EQ(a.complement().count(), bits - a.count());
    }
}
