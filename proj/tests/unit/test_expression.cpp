#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "isodyn/expression.hpp"

using isodyn::Expression;
using isodyn::ParseError;

namespace {

// Independent reference: a second recursive-descent pass that evaluates on
// the fly, with no AST. Used to cross-check the library parser.
struct RefEval {
    std::string_view s;
    std::size_t pos = 0;
    double x;

    double run() {
        const double v = expr();
        skip();
        if (pos != s.size()) throw ParseError("ref: trailing input", pos, "end");
        return v;
    }
    void skip() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    double expr() {
        double v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }
    double term() {
        double v = factor();
        for (;;) {
            if (eat('*'))
                v *= factor();
            else if (eat('/'))
                v /= factor();
            else
                return v;
        }
    }
    double factor() {
        const double b = base();
        if (eat('^')) return std::pow(b, factor());
        return b;
    }
    double base() {
        skip();
        if (eat('-')) return -base();
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) throw ParseError("ref: expected )", pos, ")");
            return v;
        }
        if (pos < s.size() && (std::isdigit((unsigned char)s[pos]) || s[pos] == '.')) {
            std::size_t used = 0;
            const double v = std::stod(std::string(s.substr(pos)), &used);
            pos += used;
            return v;
        }
        std::size_t start = pos;
        while (pos < s.size() && std::isalpha((unsigned char)s[pos])) ++pos;
        const std::string_view name = s.substr(start, pos - start);
        if (name == "x") return x;
        if (!eat('(')) throw ParseError("ref: expected (", pos, "(");
        const double a = expr();
        if (!eat(')')) throw ParseError("ref: expected )", pos, ")");
        if (name == "sin") return std::sin(a);
        if (name == "cos") return std::cos(a);
        if (name == "sqrt") return std::sqrt(a);
        if (name == "exp") return std::exp(a);
        if (name == "log") return std::log(a);
        throw ParseError("ref: unknown function", start, "function");
    }
};

double ref_eval(std::string_view src, double x) {
    RefEval r{src, 0, x};
    return r.run();
}

std::string random_expression(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_real_distribution<double> num(0.1, 4.0);
    auto literal = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", num(rng));
        return std::string(buf);
    };
    if (depth <= 0) return pick(rng) < 5 ? std::string("x") : literal();
    switch (pick(rng)) {
        case 0: return random_expression(rng, depth - 1) + "+" + random_expression(rng, depth - 1);
        case 1: return random_expression(rng, depth - 1) + "-" + random_expression(rng, depth - 1);
        case 2: return random_expression(rng, depth - 1) + "*" + random_expression(rng, depth - 1);
        case 3:
            return "(" + random_expression(rng, depth - 1) + ")/(" + literal() + "+" +
                   literal() + ")";
        case 4: return "sin(" + random_expression(rng, depth - 1) + ")";
        case 5: return "cos(" + random_expression(rng, depth - 1) + ")";
        case 6: return "exp(0.3*sin(" + random_expression(rng, depth - 1) + "))";
        case 7: return "sqrt(1.5+sin(" + random_expression(rng, depth - 1) + "))";
        case 8: return "-" + random_expression(rng, depth - 1);
        default: return "(" + random_expression(rng, depth - 1) + ")^2";
    }
}

} // namespace

TEST_CASE("expression: literals, precedence, associativity") {
    CHECK(Expression::parse("2+3*4")(0.0) == doctest::Approx(14.0));
    CHECK(Expression::parse("8/4/2")(0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("2^3^2")(0.0) == doctest::Approx(512.0)); // right-assoc
    CHECK(Expression::parse("2^-1")(0.0) == doctest::Approx(0.5));
    CHECK(Expression::parse("1.5e2")(0.0) == doctest::Approx(150.0));
    CHECK(Expression::parse(" x * ( x + 1 ) ")(3.0) == doctest::Approx(12.0));
    // unary minus binds to the base: -x^2 == (-x)^2
    CHECK(Expression::parse("-x^2")(3.0) == doctest::Approx(9.0));
    CHECK(Expression::parse("0-x^2")(3.0) == doctest::Approx(-9.0));
}

TEST_CASE("expression: functions") {
    CHECK(Expression::parse("sin(x)")(1.2) == doctest::Approx(std::sin(1.2)).epsilon(1e-15));
    CHECK(Expression::parse("sqrt(1+4*x)")(2.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(Expression::parse("log(exp(x))")(0.7) == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("expression: parse errors carry position and expectation") {
    try {
        Expression::parse("2+");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.position == 2);
    }
    try {
        Expression::parse("sin x");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.expected == "'('");
    }
    CHECK_THROWS_AS(Expression::parse("(1+2"), ParseError);
    CHECK_THROWS_AS(Expression::parse("tan(x)"), ParseError);
    CHECK_THROWS_AS(Expression::parse("1 2"), ParseError);
    CHECK_THROWS_AS(Expression::parse(""), ParseError);
}

TEST_CASE("expression: parser agrees with the direct reference evaluator") {
    std::mt19937_64 rng(20260809);
    int tested = 0;
    while (tested < 50) {
        const std::string src = random_expression(rng, 3);
        double xs[3] = {-0.7, 0.31, 1.9};
        bool usable = true;
        double ref[3];
        for (int i = 0; i < 3; ++i) {
            ref[i] = ref_eval(src, xs[i]);
            if (!std::isfinite(ref[i]) || std::abs(ref[i]) > 1e6) usable = false;
        }
        if (!usable) continue;
        const Expression e = Expression::parse(src);
        for (int i = 0; i < 3; ++i) {
            const double got = e(xs[i]);
            CHECK(std::abs(got - ref[i]) <= 1e-14 * std::max(1.0, std::abs(ref[i])));
        }
        ++tested;
    }
    CHECK(tested == 50);
}
