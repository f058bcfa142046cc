#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igkit/errors.hpp"
#include "igkit/expr.hpp"

#include <cmath>

using namespace igkit;

TEST_CASE("evaluation and variable conventions") {
    Expression e = Expression::parse("x1 * (2 - w1) + (1 - x1) * (w1 - 1)");
    std::vector<double> x{0.3};
    CHECK(e.eval(x, Point::at_atom(0)) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(e.eval(x, Point::at_atom(1)) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(e.param_dim() == 1);
    CHECK(e.sample_arity() == 1);

    Expression g = Expression::parse("exp(-x1^2 / w1^(1/3))");
    std::vector<double> y{0.5};
    CHECK(g.eval(y, Point::at_coord(0.125)) ==
          doctest::Approx(std::exp(-0.25 / 0.5)).epsilon(1e-14));
}

TEST_CASE("operator precedence and associativity") {
    std::vector<double> none;
    Point w = Point::at_atom(0);
    CHECK(Expression::parse("-2^2").eval(none, w) == doctest::Approx(-4.0));
    CHECK(Expression::parse("2^3^2").eval(none, w) == doctest::Approx(512.0));
    CHECK(Expression::parse("2 + 3 * 4").eval(none, w) == doctest::Approx(14.0));
    CHECK(Expression::parse("pow(2, 10)").eval(none, w) == doctest::Approx(1024.0));
}

TEST_CASE("print is parseable and tree-stable") {
    Expression e = Expression::parse("x1 * exp(w1) - sqrt(abs(x2)) / cosh(w1 ^ 2)");
    Expression round = Expression::parse(e.print());
    CHECK(e.same_tree(round));
    CHECK(round.print() == e.print());
}

TEST_CASE("syntax and domain errors") {
    CHECK_THROWS_AS(Expression::parse("x1 +"), SyntaxError);
    CHECK_THROWS_AS(Expression::parse("foo(x1)"), UnknownIdentifier);
    CHECK_THROWS_AS(Expression::parse("pow(x1)"), ArityError);
    try {
        Expression::parse("x1 + * 2");
        CHECK(false);
    } catch (const SyntaxError& s) {
        CHECK(s.offset() == 5);
    }

    Expression lg = Expression::parse("log(x1)");
    std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(lg.eval(neg, Point::at_atom(0)), DomainError);
    Expression dv = Expression::parse("1 / x1");
    std::vector<double> zero{0.0};
    CHECK_THROWS_AS(dv.eval(zero, Point::at_atom(0)), DomainError);
}

TEST_CASE("directional log-derivative against analytic values") {
    // ln exp(x1 * w1) is linear in x, so the central difference is exact.
    Expression e = Expression::parse("exp(x1 * w1)");
    std::vector<double> x{0.4}, v{1.0};
    CHECK(dlog_dv(e, x, v, Point::at_atom(2)) == doctest::Approx(3.0).epsilon(1e-10));

    // d/dx ln(x^3) = 3/x; quadratic truncation error only.
    Expression c = Expression::parse("x1 ^ 3");
    std::vector<double> y{0.7};
    CHECK(dlog_dv(c, y, v, Point::at_atom(0)) ==
          doctest::Approx(3.0 / 0.7).epsilon(1e-7));

    std::vector<double> v0{0.0};
    CHECK(dlog_dv(c, y, v0, Point::at_atom(0)) == 0.0);

    std::vector<double> edge{1e-9};
    CHECK_THROWS_AS(dlog_dv(Expression::parse("x1"), edge, v, Point::at_atom(0)),
                    DomainError);
}
