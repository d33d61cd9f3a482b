#include <gtest/gtest.h>

#include <numeric>

#include "metamodel/lattice.hpp"

using namespace metamodel;
using namespace metamodel::lattice;

namespace {

// Union-find labeling, independent of the library's flood fill.
struct Labels {
    std::vector<int> parent;
    explicit Labels(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

Labels label(std::uint32_t bits, int L) {
    Labels lab(L * L);
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            int v = r * L + c;
            if (!((bits >> v) & 1U)) continue;
            if (c + 1 < L && ((bits >> (v + 1)) & 1U)) lab.join(v, v + 1);
            if (r + 1 < L && ((bits >> (v + L)) & 1U)) lab.join(v, v + L);
        }
    return lab;
}

int neighbors(std::uint32_t bits, int L, int v) {
    int r = v / L, c = v % L, n = 0;
    auto on = [&](int rr, int cc) { return rr >= 0 && cc >= 0 && rr < L && cc < L && ((bits >> (rr * L + cc)) & 1U); };
    n += on(r - 1, c) + on(r + 1, c) + on(r, c - 1) + on(r, c + 1);
    return n;
}

std::array<std::size_t, 9> oracle_sizes(int L) {
    std::array<std::size_t, 9> s{};
    int corner = L * L - 1;
    for (std::uint32_t b = 0; b < (1U << (L * L)); ++b) {
        int n = std::popcount(b);
        s[0] += n == 1;
        s[1] += n == 2;
        s[2] += n == 3;
        s[3] += n == 4;
        s[4] += n >= 3;
        s[5] += b & 1U;
        auto lab = label(b, L);
        s[6] += (b & 1U) && ((b >> corner) & 1U) && lab.find(0) == lab.find(corner);
        bool thin = true;
        for (int v = 0; v < L * L; ++v)
            if ((b >> v) & 1U) {
                int w = neighbors(b, L, v);
                thin = thin && (w == 1 || w == 2);
            }
        s[7] += thin;
        s[8] += !thin;
    }
    return s;
}

const LatticeBuild& build3() {
    static const LatticeBuild b = build_lattice_framework(3);
    return b;
}

}  // namespace

TEST(Lattice, ComponentsAndWidths) {
    Pattern p{3, 0b000'011'011};  // 2x2 block in the first two rows and columns
    EXPECT_EQ(connected_components(p).size(), 1U);
    EXPECT_EQ(components_token(p), "0,1,3,4");
    EXPECT_EQ(neighbor_counts(p), (std::vector<int>{2, 2, 2, 2}));
    EXPECT_TRUE(is_thin(p, WidthRule::NeighborCount));
    EXPECT_FALSE(is_thin(p, WidthRule::SelfInclusive));

    Pattern diag{3, 0b100'010'001};
    EXPECT_EQ(connected_components(diag).size(), 3U);
    EXPECT_EQ(parse_components(components_token(diag)), connected_components(diag));
    EXPECT_FALSE(is_thin(diag, WidthRule::NeighborCount));  // isolated points have width 0
    EXPECT_TRUE(is_thin(Pattern{3, 0}, WidthRule::NeighborCount));
    EXPECT_THROW(check_side(5), Error);
}

TEST(Lattice, ThinCountsUnderBothReadings) {
    const auto& cal = build3().calibration;
    EXPECT_EQ(cal.thin_neighbor_count, 140U);
    EXPECT_EQ(cal.thin_self_inclusive, 163U);
    EXPECT_FALSE(cal.width_matched);
    EXPECT_EQ(cal.width_rule, WidthRule::NeighborCount);
}

TEST(Lattice, ExtensionSizesMatchIndependentOracle) {
    for (int L : {2, 3}) {
        auto b = L == 3 ? build3() : build_lattice_framework(L);
        auto want = oracle_sizes(L);
        for (std::size_t i = 0; i < 9; ++i)
            EXPECT_EQ(b.framework.dataset("w" + std::to_string(i + 1)).size(), want[i]) << "L=" << L << " m" << i + 1;
        EXPECT_TRUE(b.framework.sweep().empty());
    }
    auto want = oracle_sizes(3);
    EXPECT_EQ(want, (std::array<std::size_t, 9>{9, 36, 84, 126, 466, 256, 51, 140, 372}));
}

TEST(Lattice, StrictBuildNamesFirstMismatch) {
    try {
        build_lattice_framework(3, true);
        FAIL();
    } catch (const CalibrationError& e) {
        EXPECT_NE(std::string(e.what()).find("m7"), std::string::npos);
        EXPECT_EQ(e.calibration.sizes[6], 51U);
    }
}

TEST(Lattice, Omega10Puzzle) {
    auto r = omega10_puzzle(build3().framework);
    EXPECT_EQ(r.omega10.size(), 17U);
    EXPECT_TRUE(r.exact_first);
    EXPECT_EQ(r.report.results[0].lambda, Ratio(1, 1));
    EXPECT_EQ(r.report.results[0].dual_text, "m7 & m8");
}

TEST(Lattice, EquationFindsTheIntersection) {
    Framework fw = build3().framework;
    auto w10 = eval_set(parse_set("w7 & w8"), fw);
    fw.add_dataset("w10", std::vector<ElementId>(w10.members().begin(), w10.members().end()));
    auto rep = solve_equation("?a & ?b == w10", fw);
    EXPECT_EQ(rep.results[0].text, "w7 & w8 == w10");
    EXPECT_TRUE(rep.results[0].exact);
}

TEST(Lattice, M11IsEmptyAndUnverified) {
    auto r = m11_report(build3().framework);
    EXPECT_TRUE(r.extension.empty());
    EXPECT_TRUE(r.ingested.unverified);
}

TEST(Lattice, PbmRendering) {
    auto pbm = to_pbm({Pattern{2, 0b1001}, Pattern{2, 0b0110}});
    EXPECT_EQ(pbm, "P1\n5 2\n1 0 0 0 1\n0 1 0 1 0\n");
    EXPECT_EQ(hex_id(ElementId{255}), "0x0ff");
}
