#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bivexp/grid.hpp"

namespace bivexp {

class ExprError : public std::runtime_error {
public:
    ExprError(const std::string& what, size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    size_t position() const { return position_; }

private:
    size_t position_;
};

/// A parsed arithmetic expression in the variable x over the complex numbers.
/// Grammar (recursive descent):
///
///   expression := term (('+'|'-') term)*
///   term       := factor (('*'|'/') factor)*
///   factor     := ('+'|'-') factor | power
///   power      := primary ('^' factor)?          right associative
///   primary    := number | 'x' | 'i' | name '(' expression ')' | '(' expression ')'
///   name       := sin | cos | exp
///
/// Numbers are real literals; 'i' is the imaginary unit ("1+2*i").
class Expression {
public:
    static Expression parse(std::string_view text) {
        Parser p{text, 0};
        Expression e;
        e.root_ = p.parse_expression(e.nodes_);
        p.skip_ws();
        if (p.pos != text.size())
            throw ExprError("unexpected trailing input '" +
                                std::string(text.substr(p.pos)) + "'",
                            p.pos);
        return e;
    }

    Complex eval(double x) const { return eval_node(root_, x); }

    /// The expression as a callable, e.g. for sample().
    std::function<Complex(double)> fn() const {
        Expression copy = *this;
        return [copy](double x) { return copy.eval(x); };
    }

private:
    enum class Op : std::uint8_t {
        literal, var_x, imag_unit,
        add, sub, mul, div, pow, neg,
        sin, cos, exp
    };
    struct Node {
        Op op;
        double literal = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    Complex eval_node(int idx, double x) const {
        const Node& n = nodes_[static_cast<size_t>(idx)];
        switch (n.op) {
            case Op::literal: return Complex(n.literal, 0.0);
            case Op::var_x: return Complex(x, 0.0);
            case Op::imag_unit: return Complex(0.0, 1.0);
            case Op::add: return eval_node(n.lhs, x) + eval_node(n.rhs, x);
            case Op::sub: return eval_node(n.lhs, x) - eval_node(n.rhs, x);
            case Op::mul: return eval_node(n.lhs, x) * eval_node(n.rhs, x);
            case Op::div: return eval_node(n.lhs, x) / eval_node(n.rhs, x);
            case Op::pow: return std::pow(eval_node(n.lhs, x), eval_node(n.rhs, x));
            case Op::neg: return -eval_node(n.lhs, x);
            case Op::sin: return std::sin(eval_node(n.lhs, x));
            case Op::cos: return std::cos(eval_node(n.lhs, x));
            case Op::exp: return std::exp(eval_node(n.lhs, x));
        }
        return Complex(0.0);
    }

    struct Parser {
        std::string_view s;
        size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool consume(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        char peek() {
            skip_ws();
            return pos < s.size() ? s[pos] : '\0';
        }

        int parse_expression(std::vector<Node>& nodes) {
            int lhs = parse_term(nodes);
            for (;;) {
                if (consume('+'))
                    lhs = make(nodes, Op::add, lhs, parse_term(nodes));
                else if (consume('-'))
                    lhs = make(nodes, Op::sub, lhs, parse_term(nodes));
                else
                    return lhs;
            }
        }

        int parse_term(std::vector<Node>& nodes) {
            int lhs = parse_factor(nodes);
            for (;;) {
                if (consume('*'))
                    lhs = make(nodes, Op::mul, lhs, parse_factor(nodes));
                else if (consume('/'))
                    lhs = make(nodes, Op::div, lhs, parse_factor(nodes));
                else
                    return lhs;
            }
        }

        int parse_factor(std::vector<Node>& nodes) {
            if (consume('-')) return make(nodes, Op::neg, parse_factor(nodes), -1);
            if (consume('+')) return parse_factor(nodes);
            return parse_power(nodes);
        }

        int parse_power(std::vector<Node>& nodes) {
            const int base = parse_primary(nodes);
            if (consume('^')) return make(nodes, Op::pow, base, parse_factor(nodes));
            return base;
        }

        int parse_primary(std::vector<Node>& nodes) {
            skip_ws();
            if (pos >= s.size()) throw ExprError("unexpected end of expression", pos);
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                double value = 0.0;
                const char* begin = s.data() + pos;
                const char* end = s.data() + s.size();
                auto [ptr, ec] = std::from_chars(begin, end, value);
                if (ec != std::errc())
                    throw ExprError("malformed number", pos);
                pos = static_cast<size_t>(ptr - s.data());
                Node n{Op::literal};
                n.literal = value;
                nodes.push_back(n);
                return static_cast<int>(nodes.size()) - 1;
            }
            if (c == '(') {
                ++pos;
                const int inner = parse_expression(nodes);
                if (!consume(')')) throw ExprError("expected ')'", pos);
                return inner;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const size_t start = pos;
                while (pos < s.size() &&
                       std::isalpha(static_cast<unsigned char>(s[pos])))
                    ++pos;
                const std::string_view name = s.substr(start, pos - start);
                if (name == "x") return make(nodes, Op::var_x, -1, -1);
                if (name == "i") return make(nodes, Op::imag_unit, -1, -1);
                Op fn;
                if (name == "sin") fn = Op::sin;
                else if (name == "cos") fn = Op::cos;
                else if (name == "exp") fn = Op::exp;
                else
                    throw ExprError("unknown name '" + std::string(name) + "'", start);
                if (!consume('(')) throw ExprError("expected '(' after function name", pos);
                const int arg = parse_expression(nodes);
                if (!consume(')')) throw ExprError("expected ')'", pos);
                return make(nodes, fn, arg, -1);
            }
            throw ExprError(std::string("unexpected character '") + c + "'", pos);
        }

        static int make(std::vector<Node>& nodes, Op op, int lhs, int rhs) {
            Node n{op};
            n.lhs = lhs;
            n.rhs = rhs;
            nodes.push_back(n);
            return static_cast<int>(nodes.size()) - 1;
        }
    };

    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace bivexp
