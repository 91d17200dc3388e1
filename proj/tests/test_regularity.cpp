#include "catalog.hpp"
#include "common.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "regularity.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace parakkt;

namespace {

// 256 interior nodes on [0, 1], few levels: the time direction carries little.
Grid line_grid(int levels = 5)
{
    return Grid::for_problem(parakkt::testing::make_problem(), {258, 0}, levels);
}

} // namespace

TEST(Holder, ConstantFieldIsFlagged)
{
    const Grid g = line_grid();
    for (double c : {0.0, 2.5}) {
        const HolderFit f = estimate_holder(Field(g, c), 2000, 1);
        EXPECT_TRUE(f.constant_field);
        EXPECT_EQ(f.H_hat, 0.0);
        EXPECT_TRUE(f.offsets.empty());
    }
}

TEST(Holder, LipschitzField)
{
    const Field v = sample(line_grid(), [](const Point& x, double) { return x[0]; });
    const HolderFit f = estimate_holder(v, 4000, 2);
    EXPECT_GE(f.alpha_hat, 0.95);
    EXPECT_LE(f.alpha_hat, 1.0);
    EXPECT_TRUE(f.bound_holds());
    // |x - x'| <= distance, so the constant cannot exceed 1 at alpha = 1.
    EXPECT_LE(f.H_hat, 1.0 + 1e-12);
}

TEST(Holder, SquareRootField)
{
    const Field v = sample(line_grid(), [](const Point& x, double) { return std::sqrt(x[0]); });
    const HolderFit f = estimate_holder(v, 4000, 3);
    EXPECT_GE(f.alpha_hat, 0.45);
    EXPECT_LE(f.alpha_hat, 0.60);
    EXPECT_TRUE(f.bound_holds());
}

TEST(Holder, SpaceTimeFieldIn2D)
{
    const ProblemSpec s = builtin_problem("tracking_box_2d");
    const Field v = sample(Grid::for_problem(s, {17, 17}, 17),
                           [](const Point& x, double t) { return x[0] + 0.5 * x[1] + t; });
    const HolderFit f = estimate_holder(v, 2000, 4);
    EXPECT_GE(f.alpha_hat, 0.95);
    EXPECT_TRUE(f.bound_holds());
}

TEST(Holder, DeterministicPerSeed)
{
    const Field v = sample(line_grid(), [](const Point& x, double t) { return std::sqrt(x[0]) + t; });
    const HolderFit a = estimate_holder(v, 2000, 5);
    const HolderFit b = estimate_holder(v, 2000, 5);
    EXPECT_EQ(a.alpha_hat, b.alpha_hat);
    EXPECT_EQ(a.H_hat, b.H_hat);
    EXPECT_EQ(a.bins_csv(), b.bins_csv());
    EXPECT_EQ(a.bins_csv().substr(0, a.bins_csv().find('\n')), "bin_lo,bin_hi,n,max_increment");
    EXPECT_EQ(a.bins.size(), 16u);
}

TEST(Holder, BoundDetectsViolation)
{
    const Field v = sample(line_grid(), [](const Point& x, double) { return x[0]; });
    HolderFit f = estimate_holder(v, 2000, 6);
    f.H_hat *= 0.5;
    EXPECT_FALSE(f.bound_holds());
}

TEST(Holder, ConfigErrors)
{
    const Field v = sample(line_grid(), [](const Point& x, double) { return x[0]; });
    EXPECT_THROW(estimate_holder(v, 999, 1), Error);
    Field bad = v;
    bad(1, 1) = std::nan("");
    EXPECT_THROW(estimate_holder(bad, 2000, 1), Error);
}

TEST(DropInitialLevel, ShiftsLevelsAndHorizon)
{
    const Grid g = line_grid(9);
    const Field v = sample(g, [](const Point& x, double t) { return x[0] + 10.0 * t; });
    const Field d = drop_initial_level(v);
    EXPECT_EQ(d.levels(), 8);
    EXPECT_DOUBLE_EQ(d.grid().time.tau(), g.time.tau());
    for (int j = 0; j < d.levels(); ++j)
        for (std::size_t i = 0; i < d.nodes(); ++i)
            EXPECT_EQ(d(j, i), v(j + 1, i));
    EXPECT_THROW(drop_initial_level(Field(line_grid(2))), Error);
}

TEST(ActiveBoundary, JumpOnHandField)
{
    const Grid g = Grid::for_problem(parakkt::testing::make_problem(), {6, 0}, 2);
    Field e(g);
    // 4 interior nodes. level 0: 0 0 3 1; level 1: all zero
    e(0, 2) = 3.0;
    e(0, 3) = 1.0;
    std::size_t pairs = 0;
    const double jump = active_boundary_jump(e, &pairs);
    const double eps = activity_threshold(e);
    ASSERT_LT(eps, 1.0);
    // Space pair (1,2) and time pairs at nodes 2 and 3.
    EXPECT_EQ(pairs, 3u);
    EXPECT_EQ(jump, 3.0);
    EXPECT_EQ(active_boundary_jump(Field(g)), 0.0);
}

TEST(Report, StrictlyFeasibleHasConstantMultiplier)
{
    const ProblemSpec s = builtin_problem("strictly_feasible_1d");
    const Model m(s, Grid::for_problem(s, {17, 0}, 17));
    const OcpResult r = solve_ocp(m);
    ASSERT_TRUE(r.converged);
    const ContinuityReport c = multiplier_continuity_report(m, r.point, 2000, 1);
    EXPECT_TRUE(c.e.constant_field);
    EXPECT_TRUE(c.gu_e.constant_field);
    EXPECT_EQ(c.active_boundary_jump, 0.0);
    EXPECT_EQ(c.boundary_pairs, 0u);
    EXPECT_FALSE(c.y.constant_field);
    EXPECT_FALSE(c.domain_note.empty());
}

TEST(Report, BoundaryJumpShrinksUnderRefinement)
{
    const ProblemSpec s = builtin_problem("tracking_box_1d");
    std::vector<double> jumps;
    for (int k = 0; k < 3; ++k) {
        const Model m(s, Grid::for_problem(s, {(8 << k) + 1, 0}, (16 << k) + 1));
        const OcpResult r = solve_ocp(m);
        ASSERT_TRUE(r.converged);
        jumps.push_back(active_boundary_jump(drop_initial_level(r.point.e)));
    }
    for (std::size_t k = 1; k < jumps.size(); ++k)
        EXPECT_LT(jumps[k], jumps[k - 1]) << k;
}
