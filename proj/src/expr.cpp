#include "fbmavg/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace fbmavg {

namespace {

enum class BinOp { add, sub, mul, div, pow };
enum class Fn { neg, sin, cos, exp, tanh, abs, sqrt };

const char* fn_name(Fn f) {
    switch (f) {
    case Fn::neg: return "-";
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::exp: return "exp";
    case Fn::tanh: return "tanh";
    case Fn::abs: return "abs";
    case Fn::sqrt: return "sqrt";
    }
    return "?";
}

} // namespace

struct CoeffExpr::Node {
    enum class Kind { literal, var_x, var_m, unary, binary } kind;
    double value = 0.0;              // literal
    Fn fn = Fn::neg;                 // unary
    BinOp op = BinOp::add;           // binary
    NodePtr a, b;                    // operands (unary uses a only)
};

namespace {

using Node = CoeffExpr::Node;
using NodePtr = CoeffExpr::NodePtr;

NodePtr make_literal(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::literal;
    n->value = v;
    return n;
}

NodePtr make_var(bool is_x) {
    auto n = std::make_shared<Node>();
    n->kind = is_x ? Node::Kind::var_x : Node::Kind::var_m;
    return n;
}

NodePtr make_unary(Fn fn, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::unary;
    n->fn = fn;
    n->a = std::move(a);
    return n;
}

NodePtr make_binary(BinOp op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

// Recursive-descent parser.
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | func '(' expr ')' | 'x' | 'm' | '(' expr ')'
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input", "end of input or an operator (+ - * / ^)");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what, const std::string& expected) {
        std::ostringstream msg;
        msg << "syntax error at offset " << pos_ << ": " << what << "; expected " << expected;
        throw ParseError(msg.str(), pos_, expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (try_consume('+'))
                lhs = make_binary(BinOp::add, lhs, parse_term());
            else if (try_consume('-'))
                lhs = make_binary(BinOp::sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (try_consume('*'))
                lhs = make_binary(BinOp::mul, lhs, parse_unary());
            else if (try_consume('/'))
                lhs = make_binary(BinOp::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (try_consume('-'))
            return make_unary(Fn::neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (try_consume('^'))
            return make_binary(BinOp::pow, base, parse_unary()); // right-associative
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("input ended", "a number, 'x', 'm', a function name, or '('");
        const char c = text_[pos_];

        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            if (!try_consume(')'))
                fail("unbalanced parenthesis", "')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.')
            return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))
            return parse_identifier();
        fail(std::string("unexpected character '") + c + "'",
             "a number, 'x', 'm', a function name, or '('");
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin)
            fail("malformed number", "digits");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_literal(v);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
                                       (text_[pos_] >= 'A' && text_[pos_] <= 'Z') ||
                                       (text_[pos_] >= '0' && text_[pos_] <= '9') ||
                                       text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        if (name == "x")
            return make_var(true);
        if (name == "m")
            return make_var(false);

        Fn fn;
        if (name == "sin") fn = Fn::sin;
        else if (name == "cos") fn = Fn::cos;
        else if (name == "exp") fn = Fn::exp;
        else if (name == "tanh") fn = Fn::tanh;
        else if (name == "abs") fn = Fn::abs;
        else if (name == "sqrt") fn = Fn::sqrt;
        else {
            pos_ = start;
            std::ostringstream msg;
            msg << "unknown identifier '" << name << "' at offset " << start;
            throw ParseError(msg.str(), start, "'x', 'm', or one of sin cos exp tanh abs sqrt");
        }
        if (!try_consume('('))
            fail("function without argument list", "'('");
        NodePtr arg = parse_expr();
        if (!try_consume(')'))
            fail("unbalanced parenthesis", "')'");
        return make_unary(fn, std::move(arg));
    }
};

int precedence(const Node& n) {
    if (n.kind == Node::Kind::binary) {
        switch (n.op) {
        case BinOp::add:
        case BinOp::sub: return 1;
        case BinOp::mul:
        case BinOp::div: return 2;
        case BinOp::pow: return 4;
        }
    }
    if (n.kind == Node::Kind::unary && n.fn == Fn::neg)
        return 3;
    return 5; // atoms and named function calls never need parentheses
}

void print_node(std::ostream& os, const Node& n);

void print_child(std::ostream& os, const Node& child, bool parens) {
    if (parens) {
        os << '(';
        print_node(os, child);
        os << ')';
    } else {
        print_node(os, child);
    }
}

void print_node(std::ostream& os, const Node& n) {
    switch (n.kind) {
    case Node::Kind::literal: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        os << buf;
        return;
    }
    case Node::Kind::var_x: os << 'x'; return;
    case Node::Kind::var_m: os << 'm'; return;
    case Node::Kind::unary:
        if (n.fn == Fn::neg) {
            os << '-';
            print_child(os, *n.a, precedence(*n.a) < precedence(n));
        } else {
            os << fn_name(n.fn) << '(';
            print_node(os, *n.a);
            os << ')';
        }
        return;
    case Node::Kind::binary: {
        const int p = precedence(n);
        const char* sym = n.op == BinOp::add ? " + "
                        : n.op == BinOp::sub ? " - "
                        : n.op == BinOp::mul ? "*"
                        : n.op == BinOp::div ? "/"
                                             : "^";
        if (n.op == BinOp::pow) {
            // right-associative: parenthesize an equal-precedence lhs
            print_child(os, *n.a, precedence(*n.a) <= p);
            os << sym;
            print_child(os, *n.b, precedence(*n.b) < p);
        } else {
            // left-associative: parenthesize an equal-precedence rhs
            print_child(os, *n.a, precedence(*n.a) < p);
            os << sym;
            print_child(os, *n.b, precedence(*n.b) <= p);
        }
        return;
    }
    }
}

std::string node_str(const Node& n) {
    std::ostringstream os;
    print_node(os, n);
    return os.str();
}

double eval_node(const Node& n, double x, double m) {
    double v = 0.0;
    switch (n.kind) {
    case Node::Kind::literal: return n.value;
    case Node::Kind::var_x: return x;
    case Node::Kind::var_m: return m;
    case Node::Kind::unary: {
        const double a = eval_node(*n.a, x, m);
        switch (n.fn) {
        case Fn::neg: v = -a; break;
        case Fn::sin: v = std::sin(a); break;
        case Fn::cos: v = std::cos(a); break;
        case Fn::exp: v = std::exp(a); break;
        case Fn::tanh: v = std::tanh(a); break;
        case Fn::abs: v = std::abs(a); break;
        case Fn::sqrt: v = std::sqrt(a); break;
        }
        break;
    }
    case Node::Kind::binary: {
        const double a = eval_node(*n.a, x, m);
        const double b = eval_node(*n.b, x, m);
        switch (n.op) {
        case BinOp::add: v = a + b; break;
        case BinOp::sub: v = a - b; break;
        case BinOp::mul: v = a * b; break;
        case BinOp::div: v = a / b; break;
        case BinOp::pow: v = std::pow(a, b); break;
        }
        break;
    }
    default: v = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(v)) {
        std::string sub = node_str(n);
        throw EvalError("non-finite value while evaluating '" + sub + "'", std::move(sub));
    }
    return v;
}

bool uses_var(const Node& n, Node::Kind var) {
    if (n.kind == var)
        return true;
    if (n.a && uses_var(*n.a, var))
        return true;
    if (n.b && uses_var(*n.b, var))
        return true;
    return false;
}

bool same_node(const Node& a, const Node& b) {
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case Node::Kind::literal: return a.value == b.value;
    case Node::Kind::var_x:
    case Node::Kind::var_m: return true;
    case Node::Kind::unary: return a.fn == b.fn && same_node(*a.a, *b.a);
    case Node::Kind::binary:
        return a.op == b.op && same_node(*a.a, *b.a) && same_node(*a.b, *b.b);
    }
    return false;
}

bool is_integer_literal(const Node& n) {
    return n.kind == Node::Kind::literal && n.value == std::floor(n.value);
}

void collect_warnings(const Node& n, bool inside_bounded, std::vector<std::string>& out) {
    switch (n.kind) {
    case Node::Kind::literal:
        return;
    case Node::Kind::var_x:
    case Node::Kind::var_m:
        if (!inside_bounded)
            out.push_back(std::string("variable '") + (n.kind == Node::Kind::var_x ? "x" : "m") +
                          "' appears outside a bounded function; g may violate the bounded-"
                          "derivative hypothesis");
        return;
    case Node::Kind::unary: {
        if (n.fn == Fn::exp)
            out.push_back("exp(...) is unbounded; g may violate the bounded-derivative hypothesis");
        const bool bounded = inside_bounded || n.fn == Fn::sin || n.fn == Fn::cos ||
                             n.fn == Fn::tanh;
        collect_warnings(*n.a, bounded, out);
        return;
    }
    case Node::Kind::binary:
        if (n.op == BinOp::pow && !is_integer_literal(*n.b))
            out.push_back("'^' with a non-integer exponent is outside the smooth-coefficient "
                          "hypotheses");
        collect_warnings(*n.a, inside_bounded, out);
        collect_warnings(*n.b, inside_bounded, out);
        return;
    }
}

} // namespace

CoeffExpr CoeffExpr::parse(std::string_view text) {
    return CoeffExpr(Parser(text).run());
}

double CoeffExpr::eval(double x, double m) const {
    return eval_node(*root_, x, m);
}

bool CoeffExpr::x_independent() const {
    return !uses_var(*root_, Node::Kind::var_x);
}

bool CoeffExpr::constant() const {
    return x_independent() && !uses_var(*root_, Node::Kind::var_m);
}

std::string CoeffExpr::str() const {
    return node_str(*root_);
}

bool CoeffExpr::same_structure(const CoeffExpr& other) const {
    return same_node(*root_, *other.root_);
}

std::vector<std::string> CoeffExpr::theory_warnings() const {
    std::vector<std::string> out;
    collect_warnings(*root_, false, out);
    return out;
}

} // namespace fbmavg
