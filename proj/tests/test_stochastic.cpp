#include <gtest/gtest.h>

#include <cmath>

#include "metamodel/iris.hpp"
#include "metamodel/stochastic.hpp"

using namespace metamodel;
using namespace metamodel::stochastic;

namespace {

const std::vector<PointSet>& iris_sets() {
    static const auto sets = iris::point_sets(iris::load_csv(METAMODEL_DATA_DIR "/iris.csv"));
    return sets;
}

const StochasticFramework& iris_fw() {
    static const StochasticFramework sfw(iris_sets());
    return sfw;
}

// Twelve points on a 4 x 3 lattice with unit spacing and three overlapping sets.
std::vector<PointSet> lattice_fixture() {
    std::vector<PointSet> sets{{"left", {}}, {"middle", {}}, {"rim", {}}};
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 3; ++y) {
            Point2 p{static_cast<double>(x), static_cast<double>(y)};
            if (x <= 1) sets[0].points.push_back(p);
            if (x == 1 || x == 2) sets[1].points.push_back(p);
            if (y == 0 || x == 3) sets[2].points.push_back(p);
        }
    return sets;
}

}  // namespace

TEST(Kde, MassIsOne) {
    std::vector<Point2> pts{{0, 0}, {1, 0.5}, {2, 2}};
    for (double sigma : {0.05, 0.3, 1.0}) {
        auto grid = FeatureGrid::covering(pts, 3 * sigma, 128);
        auto d = kde(pts, gaussian_kernel(sigma), grid);
        EXPECT_NEAR(d.mass(), 1.0, 1e-9) << sigma;
    }
    // A kernel far narrower than a cell still carries its point's share.
    auto grid = FeatureGrid::covering(pts, 0.5, 32);
    EXPECT_NEAR(kde(pts, gaussian_kernel(1e-4), grid).mass(), 1.0, 1e-9);
}

TEST(Kde, InvalidInputs) {
    EXPECT_THROW(gaussian_kernel(0), Error);
    EXPECT_THROW(FeatureGrid(0, 1, 0, 1, 8, 8), Error);
    EXPECT_THROW(FeatureGrid(0, 0, 0, 1, 64, 64), Error);
    auto grid = FeatureGrid::covering({{0, 0}}, 1, 64);
    EXPECT_THROW(kde({}, gaussian_kernel(1), grid), Error);
    EXPECT_THROW(support_region(kde({{0, 0}}, gaussian_kernel(0.2), grid), 0.0), Error);
}

TEST(SupportRegion, IsTheSmallestHighestDensitySet) {
    for (const auto& d : iris_fw().densities()) {
        for (double chi : {0.5, 0.9, 0.97}) {
            auto r = support_region(d, chi);
            double inside = mass_in(d, r.mask);
            EXPECT_GE(inside, chi * d.mass() - 1e-12);
            IndexSet without = r.mask;
            without.set(*r.last_cell, false);
            EXPECT_LT(mass_in(d, without), chi * d.mass());
            double min_in = INFINITY, max_out = 0;
            for (std::size_t c = 0; c < d.values.size(); ++c) {
                if (r.mask.test(c)) min_in = std::min(min_in, d.values[c]);
                else max_out = std::max(max_out, d.values[c]);
            }
            EXPECT_GE(min_in, max_out);
        }
    }
}

TEST(Regions, BooleanCombinationAndLambda) {
    const auto& sfw = iris_fw();
    const auto& r = sfw.regions();
    auto both = region_op(ops::kAnd, r[1], r[2]);
    EXPECT_EQ(both.mask, r[1].mask & r[2].mask);
    EXPECT_EQ(region_complement(r[0]).size(), sfw.grid().cells() - r[0].size());
    EXPECT_DOUBLE_EQ(stochastic_lambda(r[1], r[1], sfw.union_density()), 1.0);
    EXPECT_EQ(sfw.eval_region(parse_set("w2 & w3")), both.mask);

    auto other = support_region(kde({{0, 0}, {1, 1}}, gaussian_kernel(0.5), FeatureGrid::covering({{0, 0}, {1, 1}}, 2, 64)), 0.9);
    EXPECT_THROW(region_op(ops::kOr, r[0], other), Error);
}

TEST(Iris, SpeciesSeparationAndOverlap) {
    const auto& sfw = iris_fw();
    EXPECT_NEAR(sfw.bandwidth().sigma, 0.3805, 1e-3);
    for (const auto& d : sfw.densities()) EXPECT_NEAR(d.mass(), 1.0, 1e-6);
    EXPECT_EQ(sfw.lambda(0, 1), 0.0);
    EXPECT_EQ(sfw.lambda(0, 2), 0.0);
    EXPECT_NEAR(sfw.lambda(1, 2), 0.59577, 1e-4);
}

TEST(Iris, GridRefinementIsStable) {
    KdeConfig fine;
    fine.resolution = 512;
    StochasticFramework sfw(iris_sets(), fine);
    EXPECT_LT(std::abs(sfw.lambda(1, 2) - iris_fw().lambda(1, 2)), 0.02);
}

TEST(Iris, SelfQueryMembership) {
    auto rep = membership_report(iris_sets()[0].points, iris_sets());
    ASSERT_EQ(rep.rows.size(), 3U);
    EXPECT_EQ(rep.rows[0].count, 50U);
    EXPECT_EQ(rep.rows[1].count, 0U);
    EXPECT_EQ(rep.rows[2].count, 0U);
    EXPECT_GT(rep.rows[0].percent, 90.0);
    EXPECT_LT(rep.rows[1].percent, 1.0);
    ASSERT_FALSE(rep.best.empty());
    EXPECT_EQ(rep.best[0].expr, "w1");
    EXPECT_DOUBLE_EQ(rep.best_lambda, 1.0);
}

TEST(Bayes, EveryCellTakesTheArgmax) {
    const auto& sfw = iris_fw();
    auto map = bayes_decision_map(sfw);
    const auto& ds = sfw.densities();
    std::size_t overlap_1 = 0, overlap_2 = 0;
    auto overlap = sfw.regions()[1].mask & sfw.regions()[2].mask;
    for (std::size_t c = 0; c < map.labels.size(); ++c) {
        int label = map.labels[c];
        if (label < 0) {
            for (const auto& d : ds) EXPECT_LT(d.values[c], map.floor);
            continue;
        }
        for (const auto& d : ds) EXPECT_LE(d.values[c], ds[label].values[c]);
        if (overlap.test(c) && label == 1) ++overlap_1;
        if (overlap.test(c) && label == 2) ++overlap_2;
    }
    EXPECT_GT(overlap_1, 0U);
    EXPECT_GT(overlap_2, 0U);
}

TEST(Convergence, HalvingReachesDiscreteCounts) {
    auto sets = lattice_fixture();
    auto disc = embed_points(sets);
    EXPECT_EQ(disc.coords.size(), 12U);
    KdeConfig cfg;
    cfg.bandwidth = 2.0;
    auto rep = convergence_check(sets, disc, cfg, 4);
    ASSERT_EQ(rep.steps.size(), 5U);
    EXPECT_DOUBLE_EQ(rep.steps.back().bandwidth, 0.125);
    EXPECT_LT(rep.steps.back().bandwidth, rep.guaranteed_below);
    EXPECT_TRUE(rep.exact_at_end);
    EXPECT_GT(rep.steps.front().error, 0U);
    EXPECT_EQ(rep.discrete[0][1], 3U);  // middle points with x = 1 lie in "left"
}

TEST(Export, ImageHeaders) {
    const auto& sfw = iris_fw();
    auto pgm = to_pgm(sfw.densities()[0]);
    EXPECT_EQ(pgm.rfind("P2\n256 256\n255\n", 0), 0U);
    auto pbm = to_pbm(sfw.grid(), sfw.regions()[0].mask);
    EXPECT_EQ(pbm.rfind("P1\n256 256\n", 0), 0U);
    auto csv = to_csv(sfw.densities()[0]);
    EXPECT_EQ(csv.rfind("ix,iy,x,y,density\n", 0), 0U);
}
