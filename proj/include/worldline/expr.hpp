#pragma once

// Expression language for analytic trajectories x(t).
//
// Grammar (whitespace insignificant):
//   expr    := term  (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?            -- right-associative
//   primary := number | 't' | 'c' | 'pi'
//            | ('sin'|'cos'|'exp'|'sqrt'|'tanh') '(' expr ')'
//            | '(' expr ')'
//
// '^' binds tighter than unary minus, so -t^2 is -(t^2). Exponents must not
// contain t or c; they are folded to a numeric literal at parse time, which
// keeps d/dt total (only f^const needs differentiating). No implicit
// multiplication: "2t" is a syntax error.

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "worldline/errors.hpp"
#include "worldline/format.hpp"
#include "worldline/units.hpp"

namespace worldline {

namespace expr_detail {

enum class Kind : unsigned char {
    Number,
    TimeVar,     // t
    LightSpeed,  // c, bound from the UnitSystem at evaluation
    Pi,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // rhs is always a Number node
    Sin,
    Cos,
    Exp,
    Sqrt,
    Tanh,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Kind kind;
    double number = 0.0;  // Kind::Number only
    NodePtr lhs;          // unary operand / left operand / function argument
    NodePtr rhs;          // binary right operand
};

inline NodePtr make_number(double v) {
    return std::make_shared<Node>(Node{Kind::Number, v, nullptr, nullptr});
}

inline NodePtr make_leaf(Kind k) {
    return std::make_shared<Node>(Node{k, 0.0, nullptr, nullptr});
}

inline bool is_number(const NodePtr& n, double v) {
    return n->kind == Kind::Number && n->number == v;
}

// Smart constructors fold constant operands and strip arithmetic identities;
// folds that could hide an evaluation-time domain error are skipped.
inline NodePtr make_neg(NodePtr a) {
    if (a->kind == Kind::Number) return make_number(-a->number);
    if (a->kind == Kind::Neg) return a->lhs;
    return std::make_shared<Node>(Node{Kind::Neg, 0.0, std::move(a), nullptr});
}

inline NodePtr make_add(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Number && b->kind == Kind::Number)
        return make_number(a->number + b->number);
    if (is_number(a, 0.0)) return b;
    if (is_number(b, 0.0)) return a;
    return std::make_shared<Node>(Node{Kind::Add, 0.0, std::move(a), std::move(b)});
}

inline NodePtr make_sub(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Number && b->kind == Kind::Number)
        return make_number(a->number - b->number);
    if (is_number(b, 0.0)) return a;
    if (is_number(a, 0.0)) return make_neg(std::move(b));
    return std::make_shared<Node>(Node{Kind::Sub, 0.0, std::move(a), std::move(b)});
}

inline NodePtr make_mul(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Number && b->kind == Kind::Number)
        return make_number(a->number * b->number);
    if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
    if (is_number(a, 1.0)) return b;
    if (is_number(b, 1.0)) return a;
    return std::make_shared<Node>(Node{Kind::Mul, 0.0, std::move(a), std::move(b)});
}

inline NodePtr make_div(NodePtr a, NodePtr b) {
    if (a->kind == Kind::Number && b->kind == Kind::Number && b->number != 0.0) {
        const double q = a->number / b->number;
        if (std::isfinite(q)) return make_number(q);
    }
    if (is_number(b, 1.0)) return a;
    return std::make_shared<Node>(Node{Kind::Div, 0.0, std::move(a), std::move(b)});
}

inline NodePtr make_pow(NodePtr base, double exponent) {
    if (exponent == 1.0) return base;
    if (exponent == 0.0) return make_number(1.0);
    if (base->kind == Kind::Number) {
        const double r = std::pow(base->number, exponent);
        if (std::isfinite(r)) return make_number(r);
    }
    return std::make_shared<Node>(
        Node{Kind::Pow, 0.0, std::move(base), make_number(exponent)});
}

inline NodePtr make_fn(Kind k, NodePtr arg) {
    if (arg->kind == Kind::Number) {
        double r = 0.0;
        switch (k) {
            case Kind::Sin: r = std::sin(arg->number); break;
            case Kind::Cos: r = std::cos(arg->number); break;
            case Kind::Exp: r = std::exp(arg->number); break;
            case Kind::Sqrt: r = std::sqrt(arg->number); break;
            case Kind::Tanh: r = std::tanh(arg->number); break;
            default: break;
        }
        if (std::isfinite(r)) return make_number(r);
    }
    return std::make_shared<Node>(Node{k, 0.0, std::move(arg), nullptr});
}

inline bool contains(const NodePtr& n, Kind k) {
    if (n->kind == k) return true;
    if (n->lhs && contains(n->lhs, k)) return true;
    if (n->rhs && contains(n->rhs, k)) return true;
    return false;
}

inline bool equal(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind) return false;
    if (a->kind == Kind::Number && a->number != b->number) return false;
    if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
    if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
    if (a->lhs && !equal(a->lhs, b->lhs)) return false;
    if (a->rhs && !equal(a->rhs, b->rhs)) return false;
    return true;
}

// --- printing ---------------------------------------------------------------

inline int precedence(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default:
            // Negative literals print with a leading '-', so treat them like
            // a unary-minus expression when deciding on parentheses.
            if (n->kind == Kind::Number && std::signbit(n->number)) return 3;
            return 5;
    }
}

inline void print_node(const NodePtr& n, std::string& out);

inline void print_child(const NodePtr& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

inline void print_node(const NodePtr& n, std::string& out) {
    switch (n->kind) {
        case Kind::Number: out += format_double(n->number); return;
        case Kind::TimeVar: out += 't'; return;
        case Kind::LightSpeed: out += 'c'; return;
        case Kind::Pi: out += "pi"; return;
        case Kind::Neg:
            out += '-';
            print_child(n->lhs, 3, out);
            return;
        case Kind::Add:
            print_child(n->lhs, 1, out);
            out += '+';
            print_child(n->rhs, 2, out);
            return;
        case Kind::Sub:
            print_child(n->lhs, 1, out);
            out += '-';
            print_child(n->rhs, 2, out);
            return;
        case Kind::Mul:
            print_child(n->lhs, 2, out);
            out += '*';
            print_child(n->rhs, 3, out);
            return;
        case Kind::Div:
            print_child(n->lhs, 2, out);
            out += '/';
            print_child(n->rhs, 3, out);
            return;
        case Kind::Pow:
            print_child(n->lhs, 5, out);
            out += '^';
            print_child(n->rhs, 5, out);
            return;
        case Kind::Sin: out += "sin("; break;
        case Kind::Cos: out += "cos("; break;
        case Kind::Exp: out += "exp("; break;
        case Kind::Sqrt: out += "sqrt("; break;
        case Kind::Tanh: out += "tanh("; break;
    }
    print_node(n->lhs, out);
    out += ')';
}

// --- evaluation --------------------------------------------------------------

inline double eval_node(const NodePtr& n, double t, double c_value) {
    switch (n->kind) {
        case Kind::Number: return n->number;
        case Kind::TimeVar: return t;
        case Kind::LightSpeed: return c_value;
        case Kind::Pi: return M_PI;
        case Kind::Neg: return -eval_node(n->lhs, t, c_value);
        case Kind::Add: return eval_node(n->lhs, t, c_value) + eval_node(n->rhs, t, c_value);
        case Kind::Sub: return eval_node(n->lhs, t, c_value) - eval_node(n->rhs, t, c_value);
        case Kind::Mul: return eval_node(n->lhs, t, c_value) * eval_node(n->rhs, t, c_value);
        case Kind::Div: {
            const double denom = eval_node(n->rhs, t, c_value);
            if (denom == 0.0) {
                std::string s;
                print_node(n, s);
                throw EvalError("division by zero", s, t);
            }
            return eval_node(n->lhs, t, c_value) / denom;
        }
        case Kind::Pow: {
            const double base = eval_node(n->lhs, t, c_value);
            const double r = std::pow(base, n->rhs->number);
            if (!std::isfinite(r)) {
                std::string s;
                print_node(n, s);
                throw EvalError("power outside real domain", s, t);
            }
            return r;
        }
        case Kind::Sqrt: {
            const double arg = eval_node(n->lhs, t, c_value);
            if (arg < 0.0) {
                std::string s;
                print_node(n, s);
                throw EvalError("sqrt of negative value", s, t);
            }
            return std::sqrt(arg);
        }
        case Kind::Sin: return std::sin(eval_node(n->lhs, t, c_value));
        case Kind::Cos: return std::cos(eval_node(n->lhs, t, c_value));
        case Kind::Tanh: return std::tanh(eval_node(n->lhs, t, c_value));
        case Kind::Exp: {
            const double r = std::exp(eval_node(n->lhs, t, c_value));
            if (!std::isfinite(r)) {
                std::string s;
                print_node(n, s);
                throw EvalError("overflow in exp", s, t);
            }
            return r;
        }
    }
    return 0.0;  // unreachable
}

// --- differentiation ---------------------------------------------------------

inline NodePtr diff_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Number:
        case Kind::LightSpeed:
        case Kind::Pi: return make_number(0.0);
        case Kind::TimeVar: return make_number(1.0);
        case Kind::Neg: return make_neg(diff_node(n->lhs));
        case Kind::Add: return make_add(diff_node(n->lhs), diff_node(n->rhs));
        case Kind::Sub: return make_sub(diff_node(n->lhs), diff_node(n->rhs));
        case Kind::Mul:
            return make_add(make_mul(diff_node(n->lhs), n->rhs),
                            make_mul(n->lhs, diff_node(n->rhs)));
        case Kind::Div:
            return make_div(make_sub(make_mul(diff_node(n->lhs), n->rhs),
                                     make_mul(n->lhs, diff_node(n->rhs))),
                            make_mul(n->rhs, n->rhs));
        case Kind::Pow: {
            const double e = n->rhs->number;
            return make_mul(make_mul(make_number(e), make_pow(n->lhs, e - 1.0)),
                            diff_node(n->lhs));
        }
        case Kind::Sin: return make_mul(make_fn(Kind::Cos, n->lhs), diff_node(n->lhs));
        case Kind::Cos:
            return make_neg(make_mul(make_fn(Kind::Sin, n->lhs), diff_node(n->lhs)));
        case Kind::Exp: return make_mul(make_fn(Kind::Exp, n->lhs), diff_node(n->lhs));
        case Kind::Sqrt:
            return make_div(diff_node(n->lhs),
                            make_mul(make_number(2.0), make_fn(Kind::Sqrt, n->lhs)));
        case Kind::Tanh:
            return make_mul(make_sub(make_number(1.0),
                                     make_pow(make_fn(Kind::Tanh, n->lhs), 2.0)),
                            diff_node(n->lhs));
    }
    return make_number(0.0);  // unreachable
}

// --- lexer / parser ----------------------------------------------------------

enum class TokKind : unsigned char {
    Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End
};

struct Token {
    TokKind kind;
    std::size_t pos;
    double number = 0.0;
    std::string_view text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        if (i_ >= src_.size()) return Token{TokKind::End, src_.size(), 0.0, {}};
        const std::size_t start = i_;
        const char ch = src_[i_];
        switch (ch) {
            case '+': ++i_; return Token{TokKind::Plus, start, 0.0, {}};
            case '-': ++i_; return Token{TokKind::Minus, start, 0.0, {}};
            case '*': ++i_; return Token{TokKind::Star, start, 0.0, {}};
            case '/': ++i_; return Token{TokKind::Slash, start, 0.0, {}};
            case '^': ++i_; return Token{TokKind::Caret, start, 0.0, {}};
            case '(': ++i_; return Token{TokKind::LParen, start, 0.0, {}};
            case ')': ++i_; return Token{TokKind::RParen, start, 0.0, {}};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                ++i_;
            return Token{TokKind::Ident, start, 0.0, src_.substr(start, i_ - start)};
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", start);
    }

private:
    Token lex_number(std::size_t start) {
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        if (i_ < src_.size() && src_[i_] == '.') {
            ++i_;
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        }
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
            std::size_t j = i_ + 1;
            if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
            if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
                i_ = j;
                while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
            }
        }
        const std::string_view text = src_.substr(start, i_ - start);
        double value = 0.0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw ParseError("malformed number '" + std::string(text) + "'", start);
        return Token{TokKind::Number, start, value, text};
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    NodePtr parse() {
        NodePtr e = parse_expr();
        if (tok_.kind != TokKind::End)
            throw ParseError("unexpected trailing input", tok_.pos);
        return e;
    }

private:
    void advance() { tok_ = lexer_.next(); }

    bool accept(TokKind k) {
        if (tok_.kind != k) return false;
        advance();
        return true;
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (accept(TokKind::Plus)) e = make_add(std::move(e), parse_term());
            else if (accept(TokKind::Minus)) e = make_sub(std::move(e), parse_term());
            else return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            if (accept(TokKind::Star)) e = make_mul(std::move(e), parse_unary());
            else if (accept(TokKind::Slash)) e = make_div(std::move(e), parse_unary());
            else return e;
        }
    }

    NodePtr parse_unary() {
        if (accept(TokKind::Minus)) return make_neg(parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (tok_.kind != TokKind::Caret) return base;
        const std::size_t caret_pos = tok_.pos;
        advance();
        NodePtr exponent = parse_unary();
        if (contains(exponent, Kind::TimeVar) || contains(exponent, Kind::LightSpeed))
            throw ParseError("exponent must be a numeric constant (no t or c)", caret_pos);
        const double value = eval_node(exponent, 0.0, 0.0);
        if (!std::isfinite(value))
            throw ParseError("exponent does not evaluate to a finite constant", caret_pos);
        return make_pow(std::move(base), value);
    }

    NodePtr parse_primary() {
        if (tok_.kind == TokKind::Number) {
            const double v = tok_.number;
            advance();
            return make_number(v);
        }
        if (tok_.kind == TokKind::Ident) {
            const std::string_view name = tok_.text;
            const std::size_t pos = tok_.pos;
            advance();
            if (name == "t") return make_leaf(Kind::TimeVar);
            if (name == "c") return make_leaf(Kind::LightSpeed);
            if (name == "pi") return make_leaf(Kind::Pi);
            Kind fn;
            if (name == "sin") fn = Kind::Sin;
            else if (name == "cos") fn = Kind::Cos;
            else if (name == "exp") fn = Kind::Exp;
            else if (name == "sqrt") fn = Kind::Sqrt;
            else if (name == "tanh") fn = Kind::Tanh;
            else throw ParseError("unknown identifier '" + std::string(name) + "'", pos);
            if (!accept(TokKind::LParen))
                throw ParseError("expected '(' after function '" + std::string(name) + "'",
                                 tok_.pos);
            NodePtr arg = parse_expr();
            if (!accept(TokKind::RParen))
                throw ParseError("expected ')'", tok_.pos);
            return make_fn(fn, std::move(arg));
        }
        if (accept(TokKind::LParen)) {
            NodePtr e = parse_expr();
            if (!accept(TokKind::RParen))
                throw ParseError("expected ')'", tok_.pos);
            return e;
        }
        throw ParseError("expected a number, 't', 'c', 'pi', a function, or '('", tok_.pos);
    }

    Lexer lexer_;
    Token tok_{TokKind::End, 0, 0.0, {}};
};

}  // namespace expr_detail

// Immutable expression tree in the variable t. Copies share structure and
// are safe to evaluate concurrently.
class Expr {
public:
    static Expr parse(std::string_view text) {
        expr_detail::Parser parser(text);
        return Expr(parser.parse());
    }

    // Exact structural derivative with respect to t.
    Expr derivative() const { return Expr(expr_detail::diff_node(root_)); }

    // Evaluates with 'c' bound from the unit system.
    double evaluate(double t, const UnitSystem& u) const {
        return expr_detail::eval_node(root_, t, u.c());
    }

    // Minimal-parentheses form; re-parses to a structurally identical tree.
    std::string str() const {
        std::string out;
        expr_detail::print_node(root_, out);
        return out;
    }

    bool depends_on_time() const {
        return expr_detail::contains(root_, expr_detail::Kind::TimeVar);
    }

    friend bool operator==(const Expr& a, const Expr& b) {
        return expr_detail::equal(a.root_, b.root_);
    }

private:
    explicit Expr(expr_detail::NodePtr root) : root_(std::move(root)) {}
    expr_detail::NodePtr root_;
};

}  // namespace worldline
