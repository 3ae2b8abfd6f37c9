#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "volterra/error.hpp"
#include "volterra/expr.hpp"
#include "volterra/problem.hpp"

using namespace volterra;

namespace {

double eval(std::string_view text, Bindings b = {}) { return parse(text).evaluate(b); }

Expression random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  switch (pick(rng)) {
    case 0: return Expression::constant(std::round(value(rng) * 1000.0) / 7.0);
    case 1: return Expression::variable(static_cast<Variable>(rng() % 3));
    case 2: return Expression::unary(static_cast<UnaryOp>(rng() % 6), random_expression(rng, depth - 1));
    case 3: return Expression::binary(BinaryOp::Pow, random_expression(rng, depth - 1),
                                      Expression::constant(static_cast<double>(rng() % 5)));
    default:
      return Expression::binary(static_cast<BinaryOp>(rng() % 4), random_expression(rng, depth - 1),
                                random_expression(rng, depth - 1));
  }
}

// Value or a marker for a domain error, so failures must also agree.
double eval_or_marker(const Expression& e, const Bindings& b) {
  try {
    return e.evaluate(b);
  } catch (const DomainError&) {
    return -12345.678;
  }
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("parse and evaluate examples") {
    CHECK(eval("1+t+s", {.t = 2, .s = 3}) == 6.0);
    CHECK(eval("sin(t/2)", {.t = std::numbers::pi}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval("3*x + x^3", {.x = 2}) == 14.0);
    CHECK(eval("t^2", {.t = 0.5}) == 0.25);
    CHECK(eval("1+t-s", {.t = 1, .s = 1}) == 1.0);
    CHECK(eval("(1+2*t)*x", {.t = 0.5, .x = 3}) == 6.0);
  }

  TEST_CASE("precedence and associativity") {
    CHECK(eval("2+3*4") == 14.0);
    CHECK(eval("2^3^2") == 512.0);
    CHECK(eval("-2^2") == -4.0);
    CHECK(eval("2*-3") == -6.0);
    CHECK(eval("8/4/2") == 1.0);
    CHECK(eval("7-2-1") == 4.0);
    CHECK(eval("(1+2)*3") == 9.0);
    CHECK(eval("2^-1") == 0.5);
    CHECK(eval("1e-3*1E3") == 1.0);
  }

  TEST_CASE("parse errors carry offsets") {
    try {
      parse("1 + * 2");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("(1+t"), ParseError);
    CHECK_THROWS_AS(parse("1+t)"), ParseError);
    CHECK_THROWS_WITH_AS(parse("y+1"), doctest::Contains("unknown identifier"), ParseError);
    CHECK_THROWS_WITH_AS(parse("tan(t)"), doctest::Contains("unknown function"), ParseError);
    CHECK_THROWS_AS(parse("sin t"), ParseError);
  }

  TEST_CASE("unbound variables and domain errors") {
    CHECK_THROWS_AS(eval("t+s", {.t = 1}), UnboundVariableError);
    CHECK_THROWS_AS(eval("log(t)", {.t = 0}), DomainError);
    CHECK_THROWS_AS(eval("log(t)", {.t = -1}), DomainError);
    CHECK_THROWS_AS(eval("0^(-1)"), DomainError);
    CHECK_THROWS_AS(eval("(-2)^0.5"), DomainError);
    CHECK_THROWS_AS(eval("sqrt(t)", {.t = -1}), DomainError);
    CHECK_THROWS_AS(eval("1/t", {.t = 0}), DomainError);
    CHECK(eval("(-2)^3") == -8.0);
  }

  TEST_CASE("differentiate examples") {
    const Variable X = Variable::X;
    CHECK(differentiate(parse("x + x^2"), X).evaluate({.x = 1}) == 3.0);
    CHECK(differentiate(parse("sin(t/2)"), Variable::T).evaluate({.t = 0}) == 0.5);
    CHECK(differentiate(parse("3*x + x^3"), X).evaluate({.x = 0}) == 3.0);
    CHECK(differentiate(parse("s*(t+s)"), X).is_constant(0.0));
    CHECK(differentiate(parse("x"), X).is_constant(1.0));
  }

  TEST_CASE("simplify folds constants and identities") {
    CHECK(simplify(parse("2*3+1")).is_constant(7.0));
    CHECK(print(simplify(parse("x*1+0"))) == "x");
    CHECK(simplify(parse("0*sin(t)")).is_constant(0.0));
    CHECK(print(simplify(parse("t^1"))) == "t");
    CHECK(simplify(parse("t^0")).is_constant(1.0));
  }

  TEST_CASE("print round trip at random points") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> point(-2.0, 2.0);
    for (int n = 0; n < 200; ++n) {
      const Expression e = random_expression(rng, 4);
      const std::string text = print(e);
      const Expression back = parse(text);
      for (int p = 0; p < 100; ++p) {
        const Bindings b{.t = point(rng), .s = point(rng), .x = point(rng)};
        const double a = eval_or_marker(e, b);
        const double c = eval_or_marker(back, b);
        if (std::isnan(a)) {
          CHECK(std::isnan(c));
        } else {
          REQUIRE_MESSAGE(a == c, text);
        }
      }
    }
  }

  TEST_CASE("derivatives of builtin expressions match central differences") {
    constexpr double h = 1e-6;
    for (const BuiltinInfo& info : builtin_catalog()) {
      const VolterraSystem sys = builtin(info.name);
      std::vector<std::pair<Expression, Variable>> cases;
      for (std::size_t i = 0; i < sys.equations(); ++i) {
        cases.emplace_back(sys.rhs(i), Variable::T);
        for (std::size_t j = 0; j < sys.bands(); ++j) {
          cases.emplace_back(sys.nonlinearity(i, j), Variable::X);
          cases.emplace_back(sys.kernel(i, j), Variable::T);
          cases.emplace_back(sys.kernel(i, j), Variable::S);
        }
      }
      for (const Expression& a : sys.curves().interior()) cases.emplace_back(a, Variable::T);
      for (const auto& [e, v] : cases) {
        const Expression d = differentiate(e, v);
        for (int p = 0; p < 50; ++p) {
          const double u = 0.01 + 0.98 * sys.horizon() * p / 49.0;
          Bindings b{.t = u, .s = u / 2, .x = 0.3 + u};
          Bindings up = b, down = b;
          switch (v) {
            case Variable::T: up.t = u + h; down.t = u - h; break;
            case Variable::S: up.s = *b.s + h; down.s = *b.s - h; break;
            case Variable::X: up.x = *b.x + h; down.x = *b.x - h; break;
          }
          const double fd = (e.evaluate(up) - e.evaluate(down)) / (2 * h);
          CHECK_MESSAGE(std::abs(d.evaluate(b) - fd) <= 1e-6, info.name, " ", print(e));
        }
      }
    }
  }

  TEST_CASE("unicode minus and function names") {
    CHECK(eval("2−3") == -1.0);
    CHECK(eval("exp(0)+cos(0)+sqrt(4)+log(1)") == 4.0);
  }
}
