#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace tw {

// Error raised when an expression cannot be evaluated at a point:
// division by zero, a non-integer power of a negative base, or the
// derivative of abs() at its kink.
struct EvalError : std::runtime_error {
    double phi;
    EvalError(const std::string& what, double phi_)
        : std::runtime_error(what), phi(phi_) {}
};

// Error raised while parsing, with a character position into the source.
struct ParseError : std::runtime_error {
    std::size_t pos;
    ParseError(const std::string& what, std::size_t pos_)
        : std::runtime_error(what), pos(pos_) {}
};

enum class NodeKind {
    Constant,
    Variable,   // the single variable `phi`
    Sum,
    Difference,
    Product,
    Quotient,
    Power,      // base^constant-exponent; exponent stored in `value`
    Abs,
    Negate,
    Sign,       // produced by differentiation of Abs; errors at 0
};

struct ExprNode {
    NodeKind kind;
    double value = 0.0;  // Constant value or Power exponent
    std::shared_ptr<const ExprNode> a, b;
};

class Expr {
  public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

    static Expr constant(double v);
    static Expr variable();

    bool valid() const { return root_ != nullptr; }
    const ExprNode& node() const { return *root_; }

    // Evaluate at phi; throws EvalError on singular points.
    double eval(double phi) const;
    std::optional<double> try_eval(double phi) const;

    // Exact symbolic derivative with light constant folding.
    Expr derivative() const;

    std::string str() const;

  private:
    std::shared_ptr<const ExprNode> root_;
};

// Grammar: numbers, `phi`, + - * / ^ (constant exponent, binds tighter
// than unary minus), abs(...), parentheses.
Expr parse_expression(const std::string& src);

}  // namespace tw
