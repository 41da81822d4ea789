#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fbmavg/expr.hpp"
#include "fbmavg/rng.hpp"

using namespace fbmavg;

namespace {

// Independent table-driven shunting-yard evaluator, used as the oracle
// for the recursive-descent implementation. Returns NaN/inf untouched.
class ShuntingYard {
public:
    static double eval(const std::string& text, double x, double m) {
        ShuntingYard sy(text, x, m);
        sy.run();
        if (sy.values_.size() != 1)
            throw std::runtime_error("reference evaluator: malformed expression");
        return sy.values_.back();
    }

private:
    ShuntingYard(const std::string& text, double x, double m) : text_(text), x_(x), m_(m) {}

    struct Op {
        std::string token; // "+","-","*","/","^","neg","(" or function name
        int prec;
        bool right_assoc;
    };

    std::string text_;
    double x_, m_;
    std::vector<double> values_;
    std::vector<Op> ops_;
    bool expect_operand_ = true;

    static int prec_of(const std::string& t) {
        if (t == "+" || t == "-") return 1;
        if (t == "*" || t == "/") return 2;
        if (t == "neg") return 3;
        if (t == "^") return 4;
        return 0;
    }

    void apply(const Op& op) {
        auto pop = [this] {
            const double v = values_.back();
            values_.pop_back();
            return v;
        };
        if (op.token == "neg") {
            values_.push_back(-pop());
        } else if (op.token == "+" || op.token == "-" || op.token == "*" || op.token == "/" ||
                   op.token == "^") {
            const double b = pop(), a = pop();
            if (op.token == "+") values_.push_back(a + b);
            else if (op.token == "-") values_.push_back(a - b);
            else if (op.token == "*") values_.push_back(a * b);
            else if (op.token == "/") values_.push_back(a / b);
            else values_.push_back(std::pow(a, b));
        } else {
            const double a = pop();
            if (op.token == "sin") values_.push_back(std::sin(a));
            else if (op.token == "cos") values_.push_back(std::cos(a));
            else if (op.token == "exp") values_.push_back(std::exp(a));
            else if (op.token == "tanh") values_.push_back(std::tanh(a));
            else if (op.token == "abs") values_.push_back(std::abs(a));
            else if (op.token == "sqrt") values_.push_back(std::sqrt(a));
            else throw std::runtime_error("reference evaluator: bad function " + op.token);
        }
    }

    void push_op(const std::string& token, bool right_assoc) {
        const int p = prec_of(token);
        while (!ops_.empty() && ops_.back().token != "(" && prec_of(ops_.back().token) != 0 &&
               (ops_.back().prec > p || (ops_.back().prec == p && !right_assoc)))
        {
            apply(ops_.back());
            ops_.pop_back();
        }
        ops_.push_back(Op{token, p, right_assoc});
    }

    void run() {
        std::size_t i = 0;
        while (i < text_.size()) {
            const char c = text_[i];
            if (c == ' ' || c == '\t') {
                ++i;
                continue;
            }
            if ((c >= '0' && c <= '9') || c == '.') {
                char* end = nullptr;
                values_.push_back(std::strtod(text_.c_str() + i, &end));
                i = static_cast<std::size_t>(end - text_.c_str());
                expect_operand_ = false;
                continue;
            }
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
                std::size_t j = i;
                while (j < text_.size() && std::isalnum(static_cast<unsigned char>(text_[j])))
                    ++j;
                const std::string name = text_.substr(i, j - i);
                i = j;
                if (name == "x") {
                    values_.push_back(x_);
                    expect_operand_ = false;
                } else if (name == "m") {
                    values_.push_back(m_);
                    expect_operand_ = false;
                } else {
                    ops_.push_back(Op{name, 0, false}); // function, resolved at ')'
                    expect_operand_ = true;
                }
                continue;
            }
            if (c == '(') {
                ops_.push_back(Op{"(", 0, false});
                expect_operand_ = true;
                ++i;
                continue;
            }
            if (c == ')') {
                while (!ops_.empty() && ops_.back().token != "(") {
                    apply(ops_.back());
                    ops_.pop_back();
                }
                if (ops_.empty())
                    throw std::runtime_error("reference evaluator: unbalanced ')'");
                ops_.pop_back(); // "("
                if (!ops_.empty() && prec_of(ops_.back().token) == 0 &&
                    ops_.back().token != "(") {
                    apply(ops_.back());
                    ops_.pop_back();
                }
                expect_operand_ = false;
                ++i;
                continue;
            }
            if (c == '-' && expect_operand_) {
                push_op("neg", true);
                ++i;
                continue;
            }
            if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
                push_op(std::string(1, c), c == '^');
                expect_operand_ = true;
                ++i;
                continue;
            }
            throw std::runtime_error(std::string("reference evaluator: bad character ") + c);
        }
        while (!ops_.empty()) {
            apply(ops_.back());
            ops_.pop_back();
        }
    }
};

// random expression trees rendered to strings for the oracle comparison
std::string random_expr(RngStream& rng, int depth) {
    const auto pick = [&rng](int n) { return static_cast<int>(rng.next_u64() % n); };
    if (depth == 0 || pick(4) == 0) {
        switch (pick(4)) {
        case 0: return "x";
        case 1: return "m";
        case 2: return std::to_string(pick(9) + 1);
        default: {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.2f", 0.25 * (pick(16) + 1));
            return buf;
        }
        }
    }
    switch (pick(8)) {
    case 0: return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
    case 1: return random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1);
    case 2: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) + "/" + random_expr(rng, depth - 1);
    case 4: return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(pick(3) + 1);
    case 5: return "-" + random_expr(rng, depth - 1);
    case 6: {
        const char* fns[] = {"sin", "cos", "tanh", "abs"};
        return std::string(fns[pick(4)]) + "(" + random_expr(rng, depth - 1) + ")";
    }
    default: return "(" + random_expr(rng, depth - 1) + ")";
    }
}

} // namespace

TEST_CASE("parse shapes and arithmetic") {
    CHECK(CoeffExpr::parse("cos(m)").str() == "cos(m)");
    CHECK(CoeffExpr::parse("2+3*m^2").eval(0.0, 2.0) == doctest::Approx(14.0));
    CHECK(CoeffExpr::parse("x*m + 2").eval(3.0, 4.0) == doctest::Approx(14.0));
    CHECK(CoeffExpr::parse("cos(m)").eval(123.0, 0.0) == doctest::Approx(1.0));
    CHECK(CoeffExpr::parse("exp(-m^2)").eval(0.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("precedence and associativity") {
    CHECK(CoeffExpr::parse("2^3^2").eval(0, 0) == doctest::Approx(512.0)); // right-assoc
    CHECK(CoeffExpr::parse("-2^2").eval(0, 0) == doctest::Approx(-4.0));   // ^ binds tighter
    CHECK(CoeffExpr::parse("2^-2").eval(0, 0) == doctest::Approx(0.25));
    CHECK(CoeffExpr::parse("6/3/2").eval(0, 0) == doctest::Approx(1.0));   // left-assoc
    CHECK(CoeffExpr::parse("1-2-3").eval(0, 0) == doctest::Approx(-4.0));
    CHECK(CoeffExpr::parse("1+2*3^2").eval(0, 0) == doctest::Approx(19.0));
    CHECK(CoeffExpr::parse("-m^2").eval(0, 3.0) == doctest::Approx(-9.0));
}

TEST_CASE("parse errors carry location and expectation") {
    SUBCASE("unknown identifier") {
        try {
            CoeffExpr::parse("cos(q)");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("'q'") != std::string::npos);
            CHECK(e.offset == 4);
        }
    }
    SUBCASE("dangling operator") {
        try {
            CoeffExpr::parse("2+");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.offset == 2);
            CHECK(!e.expected.empty());
        }
    }
    SUBCASE("unbalanced parenthesis") {
        CHECK_THROWS_AS(CoeffExpr::parse("(1+2"), ParseError);
        CHECK_THROWS_AS(CoeffExpr::parse("sin 2"), ParseError);
        CHECK_THROWS_AS(CoeffExpr::parse("1 2"), ParseError);
        CHECK_THROWS_AS(CoeffExpr::parse(""), ParseError);
    }
}

TEST_CASE("evaluation errors carry the offending subexpression") {
    SUBCASE("division by zero") {
        try {
            CoeffExpr::parse("1/m").eval(0.0, 0.0);
            FAIL("expected EvalError");
        } catch (const EvalError& e) {
            CHECK(e.subexpr == "1/m");
        }
    }
    SUBCASE("sqrt of a negative") {
        CHECK_THROWS_AS(CoeffExpr::parse("sqrt(m)").eval(0.0, -1.0), EvalError);
    }
    SUBCASE("overflow") {
        CHECK_THROWS_AS(CoeffExpr::parse("exp(m)").eval(0.0, 1e4), EvalError);
    }
}

TEST_CASE("x independence detection") {
    CHECK(CoeffExpr::parse("cos(m)+m^2").x_independent());
    CHECK(!CoeffExpr::parse("tanh(x)*cos(m)+sin(x)").x_independent());
    CHECK(CoeffExpr::parse("1.5").constant());
    CHECK(!CoeffExpr::parse("m").constant());
}

TEST_CASE("pretty-print round trip preserves structure") {
    RngStream rng(20250810);
    int checked = 0;
    while (checked < 200) {
        const std::string text = random_expr(rng, 4);
        CoeffExpr first = [&] {
            try {
                return CoeffExpr::parse(text);
            } catch (const ParseError&) {
                FAIL("generator produced unparsable text: ", text);
                throw;
            }
        }();
        const std::string printed = first.str();
        const CoeffExpr second = CoeffExpr::parse(printed);
        CHECK_MESSAGE(first.same_structure(second), "text=", text, " printed=", printed);
        CHECK(second.str() == printed);
        ++checked;
    }
}

TEST_CASE("agrees with the shunting-yard reference") {
    RngStream rng(987654);
    const double points[][2] = {{0.3, -0.7}, {1.2, 0.4}, {-2.0, 2.0}};
    int compared = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const std::string text = random_expr(rng, 4);
        const CoeffExpr expr = CoeffExpr::parse(text);
        for (const auto& p : points) {
            double ref;
            try {
                ref = ShuntingYard::eval(text, p[0], p[1]);
            } catch (const std::exception&) {
                continue;
            }
            if (!std::isfinite(ref)) {
                CHECK_THROWS_AS(expr.eval(p[0], p[1]), EvalError);
                continue;
            }
            const double got = expr.eval(p[0], p[1]);
            const double tol = 1e-12 * std::max(1.0, std::abs(ref));
            CHECK_MESSAGE(std::abs(got - ref) <= tol, "text=", text, " got=", got, " ref=", ref);
            ++compared;
        }
    }
    CHECK(compared > 300); // most samples must be finite
}

TEST_CASE("theory warnings") {
    CHECK(CoeffExpr::parse("cos(m)").theory_warnings().empty());
    CHECK(CoeffExpr::parse("tanh(x)*cos(m)+sin(x)").theory_warnings().empty());
    CHECK(!CoeffExpr::parse("cos(m)+m^2").theory_warnings().empty());
    CHECK(!CoeffExpr::parse("exp(m)").theory_warnings().empty());
    CHECK(!CoeffExpr::parse("sin(m)^0.5").theory_warnings().empty());
}
