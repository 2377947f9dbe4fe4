#ifndef ISODYN_EXPRESSION_HPP
#define ISODYN_EXPRESSION_HPP

#include <string>
#include <string_view>
#include <vector>

#include "isodyn/common.hpp"

namespace isodyn {

/// One-variable arithmetic expression over x.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' factor)?            -- '^' right-associative
///   base   := '-' base | number | 'x' | '(' expr ')' | func '(' expr ')'
///   func   := sin | cos | sqrt | exp | log
/// Numbers are decimal literals with optional exponent; whitespace is
/// insignificant. Parse failures raise ParseError with the offending
/// position and the expected token.
class Expression {
public:
    static Expression parse(std::string_view source);

    double operator()(double x) const;
    const std::string& source() const { return source_; }

private:
    enum class Op { Number, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Sqrt, Exp, Log };
    struct Node {
        Op op;
        double value = 0.0;
        int a = -1;
        int b = -1;
    };

    double eval(int node, double x) const;

    std::string source_;
    std::vector<Node> nodes_;
    int root_ = -1;

    friend class ExprParser;
};

} // namespace isodyn

#endif
