#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fbmavg {

/// Syntax error with the byte offset of the offending token and a
/// human-readable description of what was expected there.
struct ParseError : std::runtime_error {
    ParseError(std::string message, std::size_t byte_offset, std::string expected_tokens)
        : std::runtime_error(std::move(message)), offset(byte_offset),
          expected(std::move(expected_tokens)) {}
    std::size_t offset;
    std::string expected;
};

/// Runtime evaluation failure (division by zero, sqrt of a negative,
/// overflow); carries the offending sub-expression.
struct EvalError : std::runtime_error {
    EvalError(std::string message, std::string offending)
        : std::runtime_error(std::move(message)), subexpr(std::move(offending)) {}
    std::string subexpr;
};

/// Parsed coefficient expression g(x, m) over literals, the variables x
/// and m, the operators + - * / ^ (with ^ tightest and right-associative,
/// then unary minus, then * /, then + -), and the functions sin, cos,
/// exp, tanh, abs, sqrt. Trees are immutable and safe to share across
/// threads.
class CoeffExpr {
public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    static CoeffExpr parse(std::string_view text);

    double eval(double x, double m) const;

    /// No free x: the simplified case, where the averaged coefficient is
    /// a constant.
    bool x_independent() const;
    /// No free variable at all.
    bool constant() const;

    /// Pretty-print; parse(str()) yields a structurally identical tree.
    std::string str() const;

    bool same_structure(const CoeffExpr& other) const;

    /// Heuristic warnings for uses outside the bounded-smooth theory
    /// hypotheses (exp, non-integer powers, variables not wrapped in a
    /// bounded function). Informational only.
    std::vector<std::string> theory_warnings() const;

    const NodePtr& root() const { return root_; }

private:
    explicit CoeffExpr(NodePtr root) : root_(std::move(root)) {}
    NodePtr root_;
};

} // namespace fbmavg
