#include "tw/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace tw {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(NodeKind k, double v = 0.0, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->value = v;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->kind == NodeKind::Constant && n->value == v;
}

// Constructors with constant folding and identity elimination.
NodePtr num(double v) { return make(NodeKind::Constant, v); }

NodePtr add(NodePtr a, NodePtr b) {
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
        return num(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make(NodeKind::Sum, 0.0, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
        return num(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make(NodeKind::Negate, 0.0, std::move(b));
    return make(NodeKind::Difference, 0.0, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
        return num(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return num(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make(NodeKind::Product, 0.0, std::move(a), std::move(b));
}

NodePtr divn(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return num(0.0);
    if (is_const(b, 1.0)) return a;
    return make(NodeKind::Quotient, 0.0, std::move(a), std::move(b));
}

NodePtr pow_node(NodePtr base, double expo) {
    if (expo == 1.0) return base;
    if (expo == 0.0) return num(1.0);
    if (base->kind == NodeKind::Constant && base->value > 0.0)
        return num(std::pow(base->value, expo));
    return make(NodeKind::Power, expo, std::move(base));
}

double eval_node(const ExprNode& n, double phi) {
    switch (n.kind) {
        case NodeKind::Constant: return n.value;
        case NodeKind::Variable: return phi;
        case NodeKind::Sum: return eval_node(*n.a, phi) + eval_node(*n.b, phi);
        case NodeKind::Difference: return eval_node(*n.a, phi) - eval_node(*n.b, phi);
        case NodeKind::Product: return eval_node(*n.a, phi) * eval_node(*n.b, phi);
        case NodeKind::Quotient: {
            double den = eval_node(*n.b, phi);
            if (den == 0.0) throw EvalError("division by zero", phi);
            double v = eval_node(*n.a, phi) / den;
            if (!std::isfinite(v)) throw EvalError("quotient overflow", phi);
            return v;
        }
        case NodeKind::Power: {
            double base = eval_node(*n.a, phi);
            double e = n.value;
            bool integral = (e == std::floor(e)) && std::abs(e) < 1e15;
            if (base < 0.0 && !integral)
                throw EvalError("non-integer power of negative base", phi);
            if (base == 0.0 && e < 0.0)
                throw EvalError("zero raised to negative power", phi);
            double v = std::pow(base, e);
            if (!std::isfinite(v)) throw EvalError("power overflow", phi);
            return v;
        }
        case NodeKind::Abs: return std::abs(eval_node(*n.a, phi));
        case NodeKind::Negate: return -eval_node(*n.a, phi);
        case NodeKind::Sign: {
            double v = eval_node(*n.a, phi);
            if (v == 0.0) throw EvalError("derivative of abs at its kink", phi);
            return v > 0.0 ? 1.0 : -1.0;
        }
    }
    throw EvalError("corrupt expression node", phi);
}

NodePtr diff_node(const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::Constant: return num(0.0);
        case NodeKind::Variable: return num(1.0);
        case NodeKind::Sum: return add(diff_node(n->a), diff_node(n->b));
        case NodeKind::Difference: return sub(diff_node(n->a), diff_node(n->b));
        case NodeKind::Product:
            return add(mul(diff_node(n->a), n->b), mul(n->a, diff_node(n->b)));
        case NodeKind::Quotient:
            return divn(sub(mul(diff_node(n->a), n->b), mul(n->a, diff_node(n->b))),
                        pow_node(n->b, 2.0));
        case NodeKind::Power:
            // d/dphi u^k = k * u^(k-1) * u'
            return mul(mul(num(n->value), pow_node(n->a, n->value - 1.0)),
                       diff_node(n->a));
        case NodeKind::Abs:
            return mul(make(NodeKind::Sign, 0.0, n->a), diff_node(n->a));
        case NodeKind::Negate:
            return make(NodeKind::Negate, 0.0, diff_node(n->a));
        case NodeKind::Sign:
            throw std::logic_error("second derivative across abs kink is not supported");
    }
    throw std::logic_error("corrupt expression node");
}

void print_node(const ExprNode& n, std::ostream& os) {
    switch (n.kind) {
        case NodeKind::Constant: os << n.value; return;
        case NodeKind::Variable: os << "phi"; return;
        case NodeKind::Sum:
            os << "("; print_node(*n.a, os); os << "+"; print_node(*n.b, os); os << ")";
            return;
        case NodeKind::Difference:
            os << "("; print_node(*n.a, os); os << "-"; print_node(*n.b, os); os << ")";
            return;
        case NodeKind::Product:
            os << "("; print_node(*n.a, os); os << "*"; print_node(*n.b, os); os << ")";
            return;
        case NodeKind::Quotient:
            os << "("; print_node(*n.a, os); os << "/"; print_node(*n.b, os); os << ")";
            return;
        case NodeKind::Power:
            os << "("; print_node(*n.a, os); os << "^" << n.value << ")";
            return;
        case NodeKind::Abs:
            os << "abs("; print_node(*n.a, os); os << ")";
            return;
        case NodeKind::Negate:
            os << "(-"; print_node(*n.a, os); os << ")";
            return;
        case NodeKind::Sign:
            os << "sign("; print_node(*n.a, os); os << ")";
            return;
    }
}

class Parser {
  public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr parse_sum() {
        NodePtr e = parse_term();
        for (;;) {
            if (accept('+')) e = add(e, parse_term());
            else if (accept('-')) e = sub(e, parse_term());
            else return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            if (accept('*')) e = mul(e, parse_unary());
            else if (accept('/')) e = divn(e, parse_unary());
            else return e;
        }
    }

    // Unary minus binds more loosely than ^: -phi^2 parses as -(phi^2).
    NodePtr parse_unary() {
        if (accept('-')) return make(NodeKind::Negate, 0.0, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) {
            double e = parse_exponent();
            return pow_node(base, e);
        }
        return base;
    }

    // Exponents must be numeric literals (optionally signed); chains like
    // a^2^3 fold right-associatively on the constants.
    double parse_exponent() {
        skip_ws();
        double sign = 1.0;
        while (accept('-')) sign = -sign;
        double v = parse_number();
        if (accept('^')) {
            double e = parse_exponent();
            v = std::pow(v, e);
        }
        return sign * v;
    }

    double parse_number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        // Exponent suffix such as 1e-3.
        if (pos_ > start && pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // not an exponent after all
            }
        }
        if (pos_ == start)
            throw ParseError("expected a number", pos_);
        try {
            return std::stod(s_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            throw ParseError("malformed number literal", start);
        }
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!accept(')'))
                throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return num(parse_number());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   std::isalnum(static_cast<unsigned char>(s_[pos_])))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "phi") return make(NodeKind::Variable);
            if (name == "abs") {
                if (!accept('('))
                    throw ParseError("expected '(' after abs", pos_);
                NodePtr e = parse_sum();
                if (!accept(')'))
                    throw ParseError("expected ')'", pos_);
                return make(NodeKind::Abs, 0.0, e);
            }
            throw ParseError("unknown identifier '" + name + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
};

}  // namespace

Expr Expr::constant(double v) { return Expr(num(v)); }
Expr Expr::variable() { return Expr(make(NodeKind::Variable)); }

double Expr::eval(double phi) const { return eval_node(*root_, phi); }

std::optional<double> Expr::try_eval(double phi) const {
    try {
        return eval(phi);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

Expr Expr::derivative() const { return Expr(diff_node(root_)); }

std::string Expr::str() const {
    std::ostringstream os;
    os.precision(17);
    print_node(*root_, os);
    return os.str();
}

Expr parse_expression(const std::string& src) {
    Parser p(src);
    return Expr(p.parse());
}

}  // namespace tw
