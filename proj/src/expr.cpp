#include "expr.hpp"

#include "common.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace parakkt::expr {

NodePtr make_number(double v)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = v;
    return n;
}

NodePtr make_variable(Var v)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::variable;
    n->var = v;
    return n;
}

NodePtr make_constant(std::string name, double v)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->name = std::move(name);
    n->value = v;
    return n;
}

NodePtr make_negate(NodePtr a)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::negate;
    n->args.push_back(std::move(a));
    return n;
}

NodePtr make_binary(char op, NodePtr a, NodePtr b)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
}

NodePtr make_call(Func f, std::vector<NodePtr> args)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::call;
    n->func = f;
    n->args = std::move(args);
    return n;
}

namespace {

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

constexpr std::array<FuncInfo, 6> functions{{
    {"sin", Func::sin, 1},
    {"cos", Func::cos, 1},
    {"exp", Func::exp, 1},
    {"abs", Func::abs, 1},
    {"min", Func::min, 2},
    {"max", Func::max, 2},
}};

constexpr std::array<std::string_view, 5> var_names{"x1", "x2", "t", "y", "u"};

std::string_view func_name(Func f)
{
    for (const auto& fi : functions)
        if (fi.func == f)
            return fi.name;
    return "?";
}

class Parser {
public:
    Parser(std::string_view text, const ConstantTable& constants)
        : text_(text), constants_(constants) {}

    NodePtr parse()
    {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            error("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void error(const std::string& what) const
    {
        fail(ErrorKind::config, "expression: " + what + " at column " + std::to_string(pos_ + 1) +
                                    " in '" + std::string(text_) + "'");
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            error(std::string("expected '") + c + "'");
    }

    NodePtr parse_expr()
    {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_binary('+', lhs, parse_term());
            else if (accept('-'))
                lhs = make_binary('-', lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term()
    {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_binary('*', lhs, parse_unary());
            else if (accept('/'))
                lhs = make_binary('/', lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary()
    {
        if (accept('-'))
            return make_negate(parse_unary());
        return parse_power();
    }

    NodePtr parse_power()
    {
        NodePtr base = parse_primary();
        if (accept('^'))
            return make_binary('^', base, parse_unary());
        return base;
    }

    NodePtr parse_primary()
    {
        skip_ws();
        if (pos_ >= text_.size())
            error("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_name();
        error(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            error("malformed number");
        }
        return make_number(v);
    }

    NodePtr parse_name()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);

        for (const auto& fi : functions) {
            if (fi.name != name)
                continue;
            expect('(');
            std::vector<NodePtr> args;
            args.push_back(parse_expr());
            while (accept(','))
                args.push_back(parse_expr());
            expect(')');
            if (static_cast<int>(args.size()) != fi.arity)
                error("function '" + std::string(name) + "' takes " + std::to_string(fi.arity) +
                      " argument(s)");
            return make_call(fi.func, std::move(args));
        }
        for (std::size_t k = 0; k < var_names.size(); ++k)
            if (var_names[k] == name)
                return make_variable(static_cast<Var>(k));
        if (auto it = constants_.find(name); it != constants_.end())
            return make_constant(std::string(name), it->second);
        if (name == "pi")
            return make_constant("pi", std::numbers::pi);
        pos_ = start;
        error("unknown name '" + std::string(name) + "'");
    }

    std::string_view text_;
    const ConstantTable& constants_;
    std::size_t pos_ = 0;
};

// Binding strength used by the printer.
int precedence(const Node& n)
{
    switch (n.kind) {
    case Node::Kind::binary:
        switch (n.op) {
        case '+':
        case '-': return 1;
        case '*':
        case '/': return 2;
        default: return 4;
        }
    case Node::Kind::negate: return 3;
    case Node::Kind::number: return n.value < 0.0 || std::signbit(n.value) ? 0 : 5;
    default: return 5;
    }
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out)
{
    if (parens)
        out += '(';
    print(child, out);
    if (parens)
        out += ')';
}

void print(const Node& n, std::string& out)
{
    switch (n.kind) {
    case Node::Kind::number: out += format_roundtrip(n.value); break;
    case Node::Kind::variable: out += var_names[static_cast<std::size_t>(n.var)]; break;
    case Node::Kind::constant: out += n.name; break;
    case Node::Kind::negate:
        out += '-';
        print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
        break;
    case Node::Kind::binary: {
        int p = precedence(n);
        const Node& a = *n.args[0];
        const Node& b = *n.args[1];
        if (n.op == '^') {
            print_child(a, precedence(a) <= 4, out);
            out += '^';
            print_child(b, precedence(b) < 3, out);
        } else {
            print_child(a, precedence(a) < p, out);
            out += ' ';
            out += n.op;
            out += ' ';
            print_child(b, precedence(b) <= p, out);
        }
        break;
    }
    case Node::Kind::call:
        out += func_name(n.func);
        out += '(';
        for (std::size_t k = 0; k < n.args.size(); ++k) {
            if (k)
                out += ", ";
            print(*n.args[k], out);
        }
        out += ')';
        break;
    }
}

bool node_uses(const Node& n, Var v)
{
    if (n.kind == Node::Kind::variable)
        return n.var == v;
    for (const auto& a : n.args)
        if (node_uses(*a, v))
            return true;
    return false;
}

} // namespace

Expression::Expression() : Expression(make_number(0.0)) {}

Expression::Expression(NodePtr root) : root_(std::move(root))
{
    compile();
}

Expression Expression::parse(std::string_view text, const ConstantTable& constants)
{
    return Expression(Parser(text, constants).parse());
}

std::string Expression::str() const
{
    std::string out;
    print(*root_, out);
    return out;
}

bool Expression::uses(Var v) const
{
    return node_uses(*root_, v);
}

void Expression::compile()
{
    program_.clear();
    std::size_t depth = 0;
    std::size_t max_depth = 0;
    auto emit = [&](Instr ins, int delta) {
        program_.push_back(ins);
        depth = static_cast<std::size_t>(static_cast<long>(depth) + delta);
        max_depth = std::max(max_depth, depth);
    };
    auto rec = [&](auto&& self, const Node& n) -> void {
        using C = Instr::Code;
        switch (n.kind) {
        case Node::Kind::number:
        case Node::Kind::constant: emit({C::push, 0, n.value}, +1); break;
        case Node::Kind::variable: emit({C::load, static_cast<std::uint8_t>(n.var), 0.0}, +1); break;
        case Node::Kind::negate:
            self(self, *n.args[0]);
            emit({C::neg}, 0);
            break;
        case Node::Kind::binary: {
            self(self, *n.args[0]);
            self(self, *n.args[1]);
            C code = C::add;
            switch (n.op) {
            case '+': code = C::add; break;
            case '-': code = C::sub; break;
            case '*': code = C::mul; break;
            case '/': code = C::div; break;
            default: code = C::pow; break;
            }
            emit({code}, -1);
            break;
        }
        case Node::Kind::call:
            for (const auto& a : n.args)
                self(self, *a);
            switch (n.func) {
            case Func::sin: emit({C::sin}, 0); break;
            case Func::cos: emit({C::cos}, 0); break;
            case Func::exp: emit({C::exp}, 0); break;
            case Func::abs: emit({C::abs}, 0); break;
            case Func::min: emit({C::min}, -1); break;
            case Func::max: emit({C::max}, -1); break;
            }
            break;
        }
    };
    rec(rec, *root_);
    if (max_depth > max_stack_depth)
        fail(ErrorKind::config, "expression: nesting too deep (" + std::to_string(max_depth) + ")");
}

double Expression::eval(const Bindings& b) const
{
    const std::array<double, 5> vars{b.x1, b.x2, b.t, b.y, b.u};
    std::array<double, max_stack_depth> stack;
    std::size_t sp = 0;
    using C = Instr::Code;
    for (const Instr& ins : program_) {
        switch (ins.code) {
        case C::push: stack[sp++] = ins.value; break;
        case C::load: stack[sp++] = vars[ins.var]; break;
        case C::neg: stack[sp - 1] = -stack[sp - 1]; break;
        case C::add: --sp; stack[sp - 1] += stack[sp]; break;
        case C::sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case C::mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case C::div: --sp; stack[sp - 1] /= stack[sp]; break;
        case C::pow: {
            --sp;
            double base = stack[sp - 1];
            double ex = stack[sp];
            // Small integer powers by repeated multiplication so that y^3 and
            // y*y*y agree bitwise with hand-written derivatives.
            if (ex == 2.0)
                stack[sp - 1] = base * base;
            else if (ex == 3.0)
                stack[sp - 1] = base * base * base;
            else
                stack[sp - 1] = std::pow(base, ex);
            break;
        }
        case C::sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case C::cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case C::exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case C::abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
        case C::min: --sp; stack[sp - 1] = std::min(stack[sp - 1], stack[sp]); break;
        case C::max: --sp; stack[sp - 1] = std::max(stack[sp - 1], stack[sp]); break;
        }
    }
    return stack[0];
}

} // namespace parakkt::expr
