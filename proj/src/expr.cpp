#include "ccp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "ccp/common.hpp"

namespace ccp {

struct Expr::Node {
    enum class Op { constant, coord, neg, add, sub, mul, div, pow, call1, call2 } op;
    double value = 0.0;
    int coord = 0;
    double (*fn1)(double) = nullptr;
    double (*fn2)(double, double) = nullptr;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& src) : s(src) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& what) {
        throw input_error("expr: " + what + " at position " + std::to_string(pos) + " in '" + s +
                          "'");
    }

    NodePtr make(Node n) { return std::make_shared<Node>(std::move(n)); }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) {
                Node n{Node::Op::add};
                n.a = lhs;
                n.b = term();
                lhs = make(std::move(n));
            } else if (eat('-')) {
                Node n{Node::Op::sub};
                n.a = lhs;
                n.b = term();
                lhs = make(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*')) {
                Node n{Node::Op::mul};
                n.a = lhs;
                n.b = factor();
                lhs = make(std::move(n));
            } else if (eat('/')) {
                Node n{Node::Op::div};
                n.a = lhs;
                n.b = factor();
                lhs = make(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    // unary minus binds looser than '^', so -x^2 = -(x^2); exponents are
    // right-associative and may themselves be signed, so 2^-3 works.
    NodePtr factor() {
        if (eat('-')) {
            Node n{Node::Op::neg};
            n.a = factor();
            return make(std::move(n));
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) {
            Node n{Node::Op::pow};
            n.a = base;
            n.b = factor();
            return make(std::move(n));
        }
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        const char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s.substr(pos), &used);
            pos += used;
            Node n{Node::Op::constant};
            n.value = v;
            return make(std::move(n));
        }
        if (c == '(') {
            ++pos;
            NodePtr inner = expr();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                ++pos;
            const std::string name = s.substr(start, pos - start);
            if (peek() == '(') return call(name);
            return variable(name);
        }
        fail("unexpected character");
    }

    NodePtr variable(const std::string& name) {
        Node n{Node::Op::coord};
        if (name == "x") n.coord = 0;
        else if (name == "y") n.coord = 1;
        else if (name == "z") n.coord = 2;
        else if (name == "w") n.coord = 3;
        else if (name.size() >= 2 && name[0] == 'x' &&
                 std::all_of(name.begin() + 1, name.end(),
                             [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
            n.coord = std::stoi(name.substr(1));
        else
            fail("unknown variable '" + name + "'");
        return make(std::move(n));
    }

    NodePtr call(const std::string& name) {
        if (!eat('(')) fail("expected '('");
        NodePtr a = expr();
        if (name == "pow" || name == "min" || name == "max") {
            if (!eat(',')) fail(name + " needs two arguments");
            NodePtr b = expr();
            if (!eat(')')) fail("missing ')'");
            Node n{Node::Op::call2};
            n.fn2 = name == "pow" ? static_cast<double (*)(double, double)>(std::pow)
                    : name == "min" ? +[](double p, double q) { return std::min(p, q); }
                                    : +[](double p, double q) { return std::max(p, q); };
            n.a = a;
            n.b = b;
            return make(std::move(n));
        }
        if (!eat(')')) fail("missing ')'");
        Node n{Node::Op::call1};
        if (name == "abs") n.fn1 = +[](double v) { return std::abs(v); };
        else if (name == "log") n.fn1 = static_cast<double (*)(double)>(std::log);
        else if (name == "exp") n.fn1 = static_cast<double (*)(double)>(std::exp);
        else if (name == "sqrt") n.fn1 = static_cast<double (*)(double)>(std::sqrt);
        else if (name == "sin") n.fn1 = static_cast<double (*)(double)>(std::sin);
        else if (name == "cos") n.fn1 = static_cast<double (*)(double)>(std::cos);
        else fail("unknown function '" + name + "'");
        n.a = a;
        return make(std::move(n));
    }
};

double eval_node(const Node& n, const std::vector<double>& coords) {
    switch (n.op) {
        case Node::Op::constant: return n.value;
        case Node::Op::coord:
            if (n.coord >= static_cast<int>(coords.size()))
                throw input_error("expr: coordinate index " + std::to_string(n.coord) +
                                  " out of range for a " + std::to_string(coords.size()) +
                                  "-dimensional point");
            return coords[n.coord];
        case Node::Op::neg: return -eval_node(*n.a, coords);
        case Node::Op::add: return eval_node(*n.a, coords) + eval_node(*n.b, coords);
        case Node::Op::sub: return eval_node(*n.a, coords) - eval_node(*n.b, coords);
        case Node::Op::mul: return eval_node(*n.a, coords) * eval_node(*n.b, coords);
        case Node::Op::div: return eval_node(*n.a, coords) / eval_node(*n.b, coords);
        case Node::Op::pow: return std::pow(eval_node(*n.a, coords), eval_node(*n.b, coords));
        case Node::Op::call1: return n.fn1(eval_node(*n.a, coords));
        case Node::Op::call2: return n.fn2(eval_node(*n.a, coords), eval_node(*n.b, coords));
    }
    return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& src) {
    Parser p(src);
    Expr e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != src.size()) p.fail("trailing input");
    e.src_ = src;
    return e;
}

double Expr::eval(const std::vector<double>& coords) const {
    if (!root_) throw input_error("expr: empty expression");
    return eval_node(*root_, coords);
}

}  // namespace ccp
