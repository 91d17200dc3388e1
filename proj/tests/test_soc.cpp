#include "catalog.hpp"
#include "common.hpp"
#include "kkt.hpp"
#include "model.hpp"
#include "optimizer.hpp"
#include "parabolic.hpp"
#include "soc.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace parakkt;
using parakkt::testing::make_problem;

namespace {

KKTPoint solve(const Model& m)
{
    OcpResult r = solve_ocp(m);
    EXPECT_TRUE(r.converged);
    return r.point;
}

// Point with e = 0 and phi the adjoint of u (not necessarily optimal).
KKTPoint unconstrained_point(const Model& m, const Field& u)
{
    KKTPoint p;
    p.u = u;
    p.y = solve_state(m, u).y;
    p.e = Field(m.grid());
    p.phi = solve_adjoint(m, p.y, p.u, p.e);
    p.J = objective(m, p.y, p.u);
    return p;
}

} // namespace

TEST(QuadraticForm, ZeroDirection)
{
    const ProblemSpec s = builtin_problem("example31_poly");
    const Model m(s, Grid::for_problem(s, {9, 0}, 9));
    const KKTPoint p = solve(m);
    EXPECT_EQ(quadratic_form(m, p, Field(m.grid()), Field(m.grid())), 0.0);
}

TEST(QuadraticForm, LinearQuadraticClosedForm)
{
    const ProblemSpec s = make_problem({{"constants", "nu = 0.1\namp = 1\nub = 0.5\n"}});
    const Model m(s, Grid::for_problem(s, {9, 0}, 9));
    const KKTPoint p = solve(m);
    const Field v = smooth_random_field(m.grid(), 3, 0);
    const Field y = solve_linearized(m, p.y, v);
    const double expect = inner(y, y, m.weights()) + 0.1 * inner(v, v, m.weights());
    EXPECT_NEAR(quadratic_form(m, p, y, v), expect, 1e-14 * expect);
}

TEST(QuadraticForm, MatchesFiniteDifferenceHessian)
{
    // Nonlinear state equation so that the phi f'' term matters; constraint
    // never binds, so the form is the reduced Hessian.
    const ProblemSpec s = make_problem({{"f", "y^3 + y"}, {"df", "3*y^2 + 1"}, {"ddf", "6*y"},
                                        {"L", "0.5*(y - amp*sin(pi*x1))^2 + 0.5*nu*u^2 + 0.1*y*u"},
                                        {"L_y", "y - amp*sin(pi*x1) + 0.1*u"}, {"L_u", "nu*u + 0.1*y"},
                                        {"L_yu", "0.1"}, {"constants", "nu = 0.1\namp = 2\nub = 50\n"},
                                        {"audit_y", "-1 1"}});
    const Model m(s, Grid::for_problem(s, {6, 0}, 6));
    const Field u = smooth_random_field(m.grid(), 9, 0);
    Field u3(m.grid());
    u3.flat() = 3.0 * u.flat();
    const KKTPoint p = unconstrained_point(m, u3);
    for (std::uint64_t k = 1; k <= 5; ++k) {
        const Field v = smooth_random_field(m.grid(), 21, k);
        const Field y = solve_linearized(m, p.y, v);
        const double q = quadratic_form(m, p, y, v);

        const double step = 1e-4;
        Field up = u3, um = u3;
        up.flat() += step * v.flat();
        um.flat() -= step * v.flat();
        Field hv(m.grid());
        hv.flat() = (reduced_gradient(m, up).flat() - reduced_gradient(m, um).flat()) / (2.0 * step);
        const double fd = inner(hv, v, m.weights());
        EXPECT_NEAR(q, fd, 1e-4 * std::abs(fd)) << k;

        const double second = (reduced_objective(m, up) - 2.0 * p.J + reduced_objective(m, um)) / (step * step);
        EXPECT_NEAR(q, second, 1e-4 * std::abs(fd)) << k;
    }
}

TEST(Legendre, ValuesOnCatalogProblems)
{
    const ProblemSpec s = builtin_problem("tracking_box_1d");
    const Model m(s, Grid::for_problem(s, {9, 0}, 9));
    const KKTPoint p = solve(m);
    EXPECT_NEAR(legendre_min(m, p).min, 0.1, 1e-12);

    const ProblemSpec s31 = builtin_problem("example31_poly");
    const Model m31(s31, Grid::for_problem(s31, {9, 0}, 9));
    const KKTPoint p31 = solve(m31);
    const LegendreResult l = legendre_min(m31, p31);
    EXPECT_GT(l.min, 0.0);
    const int j = l.level;
    const double direct = s31.L.duu(l.x, l.t, p31.y(j, l.node), p31.u(j, l.node)) +
                          p31.e(j, l.node) * s31.g.duu(l.x, l.t, p31.y(j, l.node), p31.u(j, l.node));
    EXPECT_EQ(l.min, direct);

    KKTPoint zero_e = p31;
    zero_e.e = Field(m31.grid());
    EXPECT_GE(legendre_min(m31, zero_e).min, s31.gamma1);
}

TEST(CriticalDirection, FlagsAreReproducibleFromFields)
{
    for (const char* name : {"tracking_box_1d", "example31_poly"}) {
        const ProblemSpec s = builtin_problem(name);
        const Model m(s, Grid::for_problem(s, {17, 0}, 17));
        const KKTPoint p = solve(m);
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const CriticalDirection d = sample_critical_direction(m, p, seed);
            CriticalDirection again;
            again.v = d.v;
            again.y = d.y;
            measure_direction(m, p, again);
            EXPECT_EQ(again.c1_value, d.c1_value);
            EXPECT_EQ(again.c2_residual, d.c2_residual);
            EXPECT_EQ(again.c3_violation, d.c3_violation);
            EXPECT_EQ(again.c1_satisfied, d.c1_satisfied);
            EXPECT_LE(d.c2_residual, tol_c2) << name;
            EXPECT_LE(d.c3_violation, tol_c3) << name;

            const CriticalDirection same = sample_critical_direction(m, p, seed);
            EXPECT_EQ(same.v.values(), d.v.values());
        }
    }
}

TEST(CriticalDirection, PureControlConstraintZerosActiveNodes)
{
    const ProblemSpec s = builtin_problem("tracking_box_1d");
    const Model m(s, Grid::for_problem(s, {17, 0}, 17));
    const KKTPoint p = solve(m);
    const double eps = activity_threshold(p.e);
    const CriticalDirection d = sample_critical_direction(m, p, 4);
    std::size_t active = 0;
    for (std::size_t k = 0; k < d.v.size(); ++k)
        if (p.e.values()[k] > eps) {
            ++active;
            EXPECT_EQ(d.v.values()[k], 0.0);
        }
    EXPECT_GT(active, 0u);
}

TEST(CriticalDirection, InactivePointLeavesDirectionUntouched)
{
    const ProblemSpec s = builtin_problem("strictly_feasible_1d");
    const Model m(s, Grid::for_problem(s, {9, 0}, 9));
    const KKTPoint p = solve(m);
    const CriticalDirection d = sample_critical_direction(m, p, 6);
    Field v = smooth_random_field(m.grid(), 6, 0);
    if (d.negated)
        v.flat() *= -1.0;
    EXPECT_EQ(d.v.values(), v.values());
    EXPECT_EQ(d.c3_violation, 0.0);
}

TEST(SmoothField, DeterministicAndNormalized)
{
    const Grid g = Grid::for_problem(builtin_problem("tracking_box_2d"), {9, 9}, 5);
    const Field a = smooth_random_field(g, 1, 2);
    const Field b = smooth_random_field(g, 1, 2);
    const Field c = smooth_random_field(g, 1, 3);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_NE(a.values(), c.values());
    EXPECT_NEAR(a.max_abs(), 1.0, 1e-15);
}

TEST(Growth, ConvexProblemHasPositiveCurvature)
{
    const ProblemSpec s = make_problem({{"constants", "nu = 0.1\namp = 2\nub = 1\n"}});
    const Model m(s, Grid::for_problem(s, {17, 0}, 17));
    const KKTPoint p = solve(m);
    const GrowthResult g = quadratic_growth_probe(m, p, 20, 1e-2, 7);
    EXPECT_EQ(g.dropped, 0);
    EXPECT_GE(g.kappa_hat, 0.4 * 0.1);
    for (const GrowthTrial& t : g.trials) {
        EXPECT_GE(t.ratio, -1e-10);
        EXPECT_GE(t.norm_du, 1e-8);
    }
}

TEST(Growth, TableAndDeterminism)
{
    const ProblemSpec s = builtin_problem("tracking_box_1d");
    const Model m(s, Grid::for_problem(s, {9, 0}, 9));
    const KKTPoint p = solve(m);
    const GrowthResult a = quadratic_growth_probe(m, p, 5, 1e-2, 3);
    const GrowthResult b = quadratic_growth_probe(m, p, 5, 1e-2, 3);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    std::istringstream in(a.to_csv());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "trial,ratio,norm_du,feasible");
    EXPECT_THROW(quadratic_growth_probe(m, p, 0, 1e-2, 3), Error);
    EXPECT_THROW(quadratic_growth_probe(m, p, 3, 0.0, 3), Error);
}
