#include "common.hpp"
#include "expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace parakkt;
using namespace parakkt::expr;

namespace {

double ev(const char* text, Bindings b = {}, const ConstantTable& c = {})
{
    return Expression::parse(text, c).eval(b);
}

ErrorKind kind_of(const char* text)
{
    try {
        Expression::parse(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::internal;
}

NodePtr random_tree(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 2);
    std::uniform_real_distribution<double> num(-3.0, 3.0);
    switch (pick(rng)) {
    case 0: return make_number(std::round(num(rng) * 100.0) / 8.0);
    case 1: return make_variable(static_cast<Var>(rng() % 5));
    case 2: return make_constant("c", 0.75);
    case 3: return make_negate(random_tree(rng, depth - 1));
    case 4: return make_binary("+-*"[rng() % 3], random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    case 5: return make_binary('^', random_tree(rng, depth - 1), make_number(static_cast<double>(rng() % 4)));
    case 6: return make_call(static_cast<Func>(rng() % 4), {random_tree(rng, depth - 1)});
    default:
        return make_call(rng() % 2 ? Func::min : Func::max,
                         {random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
    }
}

} // namespace

TEST(Expr, Precedence)
{
    Bindings b;
    b.y = 3.0;
    EXPECT_DOUBLE_EQ(ev("-y^2", b), -9.0);
    EXPECT_DOUBLE_EQ(ev("2^-1"), 0.5);
    EXPECT_DOUBLE_EQ(ev("2^3^2"), 512.0);
    EXPECT_DOUBLE_EQ(ev("1 - 2 - 3"), -4.0);
    EXPECT_DOUBLE_EQ(ev("12 / 3 / 2"), 2.0);
    EXPECT_DOUBLE_EQ(ev("1 + 2*3"), 7.0);
    EXPECT_DOUBLE_EQ(ev("(1 + 2)*3"), 9.0);
}

TEST(Expr, VariablesFunctionsConstants)
{
    Bindings b{0.25, 0.5, 0.75, -2.0, 3.0};
    EXPECT_DOUBLE_EQ(ev("x1 + 10*x2 + 100*t", b), 0.25 + 5.0 + 75.0);
    EXPECT_DOUBLE_EQ(ev("abs(y) * u", b), 6.0);
    EXPECT_DOUBLE_EQ(ev("min(y, u) + max(y, u)", b), 1.0);
    EXPECT_DOUBLE_EQ(ev("sin(pi*x1)", b), std::sin(M_PI * 0.25));
    EXPECT_DOUBLE_EQ(ev("exp(-t)*cos(x2)", b), std::exp(-0.75) * std::cos(0.5));
    EXPECT_DOUBLE_EQ(ev("nu*u", b, {{"nu", 0.1}}), 0.1 * 3.0);
    EXPECT_DOUBLE_EQ(ev("1.5e-3 * 2E2"), 0.3);
}

TEST(Expr, UsesReportsVariables)
{
    const auto e = Expression::parse("y^3 + t");
    EXPECT_TRUE(e.uses(Var::y));
    EXPECT_TRUE(e.uses(Var::t));
    EXPECT_FALSE(e.uses(Var::u));
    EXPECT_FALSE(e.uses(Var::x1));
}

TEST(Expr, MalformedInputIsConfigError)
{
    for (const char* bad : {"", "1 +", "(1", "1)", "sin(1, 2)", "min(1)", "foo", "bar(1)", "1 $ 2", "2..3",
                            "y y"})
        EXPECT_EQ(kind_of(bad), ErrorKind::config) << bad;
}

TEST(Expr, DeepNestingRejected)
{
    std::string s;
    for (int k = 0; k < 100; ++k)
        s += "1 + (";
    s += "1" + std::string(100, ')');
    EXPECT_EQ(kind_of(s.c_str()), ErrorKind::config);
}

TEST(Expr, CanonicalPrintRoundTrips)
{
    std::mt19937_64 rng(7);
    const ConstantTable constants{{"c", 0.75}};
    std::uniform_real_distribution<double> val(-1.5, 1.5);
    for (int k = 0; k < 400; ++k) {
        // Generated trees may hold negative literals, which the parser never
        // produces; canonical form is what a first parse prints.
        const Expression e(random_tree(rng, 4));
        const Expression first = Expression::parse(e.str(), constants);
        const std::string text = first.str();
        const Expression back = Expression::parse(text, constants);
        ASSERT_EQ(back.str(), text);
        for (int s = 0; s < 5; ++s) {
            Bindings b{val(rng), val(rng), val(rng), val(rng), val(rng)};
            const double a = e.eval(b);
            const double c = back.eval(b);
            if (std::isnan(a))
                EXPECT_TRUE(std::isnan(c)) << text;
            else
                EXPECT_EQ(a, c) << text;
        }
    }
}

TEST(Format, RoundtripIsExact)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> expo(-300.0, 300.0);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::pow(10.0, expo(rng)) * (k % 2 ? -1.0 : 1.0);
        EXPECT_EQ(std::stod(format_roundtrip(v)), v);
        EXPECT_EQ(std::stod(format17(v)), v);
    }
    EXPECT_EQ(format_roundtrip(0.1), "0.1");
}
