#include "isodyn/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace isodyn {

class ExprParser {
public:
    explicit ExprParser(std::string_view src, Expression& out) : src_(src), out_(out) {}

    void run() {
        out_.root_ = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("end of input");
    }

private:
    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError("parse error at position " + std::to_string(pos_) + ": expected " +
                             expected,
                         pos_, expected);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    int add(Expression::Op op, int a = -1, int b = -1, double v = 0.0) {
        out_.nodes_.push_back({op, v, a, b});
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = add(Expression::Op::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = add(Expression::Op::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = add(Expression::Op::Mul, lhs, parse_factor());
            else if (accept('/'))
                lhs = add(Expression::Op::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    int parse_factor() {
        const int base = parse_base();
        if (accept('^')) return add(Expression::Op::Pow, base, parse_factor());
        return base;
    }

    int parse_base() {
        skip_ws();
        if (pos_ >= src_.size()) fail("number, 'x', '(', function or '-'");
        const char c = src_[pos_];

        if (c == '-') {
            ++pos_;
            return add(Expression::Op::Neg, parse_base());
        }
        if (c == '(') {
            ++pos_;
            const int e = parse_expr();
            if (!accept(')')) fail("')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        fail("number, 'x', '(', function or '-'");
    }

    int parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // the 'e' was not an exponent
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc{} || res.ptr != src_.data() + pos_) {
            pos_ = start;
            fail("number");
        }
        return add(Expression::Op::Number, -1, -1, value);
    }

    int parse_name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return add(Expression::Op::Var);

        Expression::Op op;
        if (name == "sin")
            op = Expression::Op::Sin;
        else if (name == "cos")
            op = Expression::Op::Cos;
        else if (name == "sqrt")
            op = Expression::Op::Sqrt;
        else if (name == "exp")
            op = Expression::Op::Exp;
        else if (name == "log")
            op = Expression::Op::Log;
        else {
            pos_ = start;
            fail("'x' or one of sin, cos, sqrt, exp, log");
        }
        if (!accept('(')) fail("'('");
        const int arg = parse_expr();
        if (!accept(')')) fail("')'");
        return add(op, arg);
    }

    std::string_view src_;
    Expression& out_;
    std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view source) {
    Expression e;
    e.source_ = std::string(source);
    ExprParser(source, e).run();
    return e;
}

double Expression::eval(int node, double x) const {
    const Node& n = nodes_[node];
    switch (n.op) {
        case Op::Number: return n.value;
        case Op::Var: return x;
        case Op::Add: return eval(n.a, x) + eval(n.b, x);
        case Op::Sub: return eval(n.a, x) - eval(n.b, x);
        case Op::Mul: return eval(n.a, x) * eval(n.b, x);
        case Op::Div: return eval(n.a, x) / eval(n.b, x);
        case Op::Pow: return std::pow(eval(n.a, x), eval(n.b, x));
        case Op::Neg: return -eval(n.a, x);
        case Op::Sin: return std::sin(eval(n.a, x));
        case Op::Cos: return std::cos(eval(n.a, x));
        case Op::Sqrt: return std::sqrt(eval(n.a, x));
        case Op::Exp: return std::exp(eval(n.a, x));
        case Op::Log: return std::log(eval(n.a, x));
    }
    return 0.0;
}

double Expression::operator()(double x) const { return eval(root_, x); }

} // namespace isodyn
