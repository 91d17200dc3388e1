#pragma once

// Closed-form arithmetic expressions used in problem definition files.
//
// Grammar (whitespace insignificant):
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]            (right associative)
//   primary := number | name | func '(' args ')' | '(' expr ')'
//   func    := sin | cos | exp | abs            (one argument)
//            | min | max                        (two arguments)
//   name    := x1 | x2 | t | y | u | pi | <constant from [constants]>
//
// So -y^2 is -(y^2) and 2^-1 is 2^(-1). Expression::str() prints the
// canonical form, which parses back to an identical tree.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace parakkt::expr {

enum class Var : std::uint8_t { x1, x2, t, y, u };

struct Bindings {
    double x1 = 0.0;
    double x2 = 0.0;
    double t = 0.0;
    double y = 0.0;
    double u = 0.0;
};

using ConstantTable = std::map<std::string, double, std::less<>>;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Func : std::uint8_t { sin, cos, exp, abs, min, max };

struct Node {
    enum class Kind : std::uint8_t { number, variable, constant, negate, binary, call };
    Kind kind = Kind::number;
    double value = 0.0;      // number, constant
    Var var = Var::x1;       // variable
    std::string name;        // constant
    char op = '+';           // binary: + - * / ^
    Func func = Func::sin;   // call
    std::vector<NodePtr> args;
};

NodePtr make_number(double v);
NodePtr make_variable(Var v);
NodePtr make_constant(std::string name, double v);
NodePtr make_negate(NodePtr a);
NodePtr make_binary(char op, NodePtr a, NodePtr b);
NodePtr make_call(Func f, std::vector<NodePtr> args);

class Expression {
public:
    Expression();   // the constant 0
    explicit Expression(NodePtr root);

    static Expression parse(std::string_view text, const ConstantTable& constants = {});

    double eval(const Bindings& b) const;
    std::string str() const;
    bool uses(Var v) const;
    const NodePtr& root() const { return root_; }

private:
    struct Instr {
        enum class Code : std::uint8_t {
            push, load, neg, add, sub, mul, div, pow, sin, cos, exp, abs, min, max
        };
        Code code;
        std::uint8_t var = 0;
        double value = 0.0;
    };

    void compile();

    NodePtr root_;
    std::vector<Instr> program_;
};

static constexpr std::size_t max_stack_depth = 64;

} // namespace parakkt::expr
