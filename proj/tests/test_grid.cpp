#include "catalog.hpp"
#include "common.hpp"
#include "field_io.hpp"
#include "grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace parakkt;

namespace {

Grid grid1(int n, int levels, double L = 1.0, double T = 1.0)
{
    return {SpatialGrid(1, {n, 0}, {L, 0.0}), TimeGrid(levels, T)};
}

Grid grid2(int n1, int n2, int levels)
{
    return {SpatialGrid(2, {n1, n2}, {2.0, 0.5}), TimeGrid(levels, 0.75)};
}

ErrorKind read_error(const std::string& text, const Grid* expected = nullptr)
{
    std::istringstream in(text);
    try {
        read_field(in, expected);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::internal;
}

} // namespace

TEST(Grid, Geometry)
{
    const Grid g = grid2(5, 9, 4);
    EXPECT_EQ(g.space.interior(0), 3);
    EXPECT_EQ(g.space.interior(1), 7);
    EXPECT_EQ(g.nodes(), 21u);
    EXPECT_EQ(g.size(), 84u);
    EXPECT_DOUBLE_EQ(g.space.spacing(0), 0.5);
    EXPECT_DOUBLE_EQ(g.space.spacing(1), 0.0625);
    EXPECT_DOUBLE_EQ(g.time.tau(), 0.25);
    EXPECT_DOUBLE_EQ(g.time.t(3), 0.75);
    for (std::size_t i = 0; i < g.nodes(); ++i) {
        auto [a, b] = g.space.multi_index(i);
        EXPECT_EQ(g.space.flat_index(a, b), i);
        const Point x = g.space.coord(i);
        EXPECT_DOUBLE_EQ(x[0], (a + 1) * 0.5);
        EXPECT_DOUBLE_EQ(x[1], (b + 1) * 0.0625);
    }
    EXPECT_DOUBLE_EQ(g.space.node_coord(4, 8)[0], 2.0);
    EXPECT_DOUBLE_EQ(g.space.node_coord(4, 8)[1], 0.5);
}

TEST(Grid, RejectsDegenerateSizes)
{
    EXPECT_THROW(SpatialGrid(1, {2, 0}, {1.0, 0.0}), Error);
    EXPECT_THROW(SpatialGrid(2, {5, 2}, {1.0, 1.0}), Error);
    EXPECT_THROW(SpatialGrid(3, {5, 5}, {1.0, 1.0}), Error);
    EXPECT_THROW(SpatialGrid(1, {5, 0}, {-1.0, 0.0}), Error);
    EXPECT_THROW(TimeGrid(1, 1.0), Error);
    EXPECT_THROW(TimeGrid(5, 0.0), Error);
}

TEST(Quadrature, ExactForConstantsAndLinearFunctions)
{
    for (const Grid& g : {grid1(9, 5, 3.0, 2.0), grid2(5, 7, 6)}) {
        const Field w = quadrature_weights(g);
        const double vol = g.space.volume() * g.time.horizon();
        const Field one(g, 1.0);
        EXPECT_NEAR(inner(one, one, w), vol, 1e-13 * vol);
        // Linear in t is integrated exactly by the trapezoid rule.
        const Field t = sample(g, [](const Point&, double s) { return s; });
        EXPECT_NEAR(inner(one, t, w), g.space.volume() * 0.5 * g.time.horizon() * g.time.horizon(), 1e-12);
        for (double v : w.values())
            EXPECT_GT(v, 0.0);
    }
}

TEST(Quadrature, SecondOrderOnSmoothIntegrand)
{
    // int_0^1 int_0^1 sin(pi x) e^t = (2/pi)(e - 1)
    const double exact = 2.0 / M_PI * (std::exp(1.0) - 1.0);
    double prev = 0.0;
    for (int k = 0; k < 4; ++k) {
        const int n = 8 * (1 << k) + 1;
        const Grid g = grid1(n, n);
        const Field f = sample(g, [](const Point& x, double t) { return std::sin(M_PI * x[0]) * std::exp(t); });
        const double err = std::abs(inner(f, Field(g, 1.0), quadrature_weights(g)) - exact);
        if (k > 0) {
            EXPECT_GT(prev / err, 3.5);
        }
        prev = err;
    }
}

TEST(Norms, AgreeWithDirectSums)
{
    const Grid g = grid2(6, 5, 4);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Field f(g);
    for (double& v : f.values())
        v = nd(rng);
    const Field w = quadrature_weights(g);
    double s = 0.0, m = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        s += w.values()[k] * f.values()[k] * f.values()[k];
        m = std::max(m, std::abs(f.values()[k]));
    }
    const FieldNorms n = field_norms(f, w);
    EXPECT_NEAR(n.l2, std::sqrt(s), 1e-13);
    EXPECT_NEAR(n.l2_time_l2_space, std::sqrt(s), 1e-13);
    EXPECT_EQ(n.linf, m);
}

TEST(Norms, MisalignedFieldsRejected)
{
    const Field a(grid1(5, 5)), b(grid1(6, 5));
    EXPECT_THROW(inner(a, b, quadrature_weights(grid1(5, 5))), Error);
}

TEST(FieldIo, RoundTripIsBitExact)
{
    for (const Grid& g : {grid1(7, 4), grid2(4, 5, 3)}) {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> ud(-1e3, 1e3);
        Field f(g);
        for (double& v : f.values())
            v = ud(rng) / 7.0;
        std::stringstream ss;
        write_field(ss, f);
        const Field back = read_field(ss, &g);
        EXPECT_TRUE(back.grid() == g);
        EXPECT_EQ(back.values(), f.values());
    }
}

TEST(FieldIo, ErrorsAreIoErrors)
{
    const Grid g = grid1(4, 3);
    std::stringstream ss;
    write_field(ss, Field(g, 1.0));
    const std::string good = ss.str();

    EXPECT_EQ(read_error(""), ErrorKind::io);
    EXPECT_EQ(read_error("NOT-A-FIELD\n1 4 3\n1 1\n"), ErrorKind::io);
    EXPECT_EQ(read_error(good.substr(0, good.size() - 4)), ErrorKind::io);   // truncated
    std::string nan = good;
    nan.replace(nan.rfind('1'), 1, "nan");
    EXPECT_EQ(read_error(nan), ErrorKind::io);
    std::string junk = good;
    junk.replace(junk.rfind('1'), 1, "abc");
    EXPECT_EQ(read_error(junk), ErrorKind::io);
    const Grid other = grid1(5, 3);
    EXPECT_EQ(read_error(good, &other), ErrorKind::io);
    EXPECT_EQ(read_error(good + "1\n"), ErrorKind::io);   // trailing values
    EXPECT_EQ(read_error(good, &g), ErrorKind::internal);   // sanity: no error
}

TEST(FieldIo, MissingFileIsIoError)
{
    try {
        read_field(std::filesystem::path("/nonexistent/y.field"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
    }
}

TEST(Norms, ReferenceValues)
{
    const Grid unit2 = grid2(9, 9, 5);
    const Field w2 = quadrature_weights(unit2);
    const FieldNorms zero = field_norms(Field(unit2), w2);
    EXPECT_EQ(zero.l2, 0.0);
    EXPECT_EQ(zero.linf, 0.0);
    EXPECT_EQ(zero.l2_time_l2_space, 0.0);

    const Grid g = {SpatialGrid(2, {9, 9}, {1.0, 1.0}), TimeGrid(5, 1.0)};
    const FieldNorms two = field_norms(Field(g, 2.0), quadrature_weights(g));
    EXPECT_NEAR(two.l2, 2.0, 1e-12);
    EXPECT_EQ(two.linf, 2.0);

    double prev = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Grid gk = grid1(8 * (1 << k) + 1, 3);
        const Field s = sample(gk, [](const Point& x, double) { return std::sin(M_PI * x[0]); });
        const double err = std::abs(field_norms(s, quadrature_weights(gk)).l2 - std::sqrt(0.5));
        if (k > 0) {
            EXPECT_GT(std::log2(prev / err), 1.9);
        }
        prev = err;
    }
}
