#include <cmath>

#include "hoferlab/expr.hpp"
#include "support.hpp"

using namespace hoferlab;
using namespace hoferlab::expr;

TEST_CASE("print is a fixed point of parse") {
  for (const char* src : {"x^2 + sin(y)*t", "bump(x^2 + y^2 - 0.25; 0.5)", "exp(neg(x))/(2 + cos(y))",
                          "-3.5*z + abs(x - y)^3"}) {
    const std::string once = print(parse(src));
    CHECK(print(parse(once)) == once);
  }
}

TEST_CASE("evaluation agrees with the standard library") {
  const ScalarField f = ScalarField::parse("x^3 - 2*sin(y)*exp(t) + sqrt(1 + z^2)");
  const Bindings b{0.7, -0.4, 1.3, 0.25};
  const double ref = std::pow(0.7, 3) - 2 * std::sin(-0.4) * std::exp(0.25) + std::sqrt(1 + 1.3 * 1.3);
  CHECK(f.value(b) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(evaluate(f.ast(), b) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("symbolic derivatives match central differences") {
  const ScalarField f = ScalarField::parse("bump(x^2 + 2*y^2 - 0.1*t; 1.5)*cos(x*y) + x/(3 + y^2)");
  const Bindings b{0.31, -0.52, 0.0, 0.4};
  const Hessian h = f.hessian(b);
  const double e = 1e-5;
  for (int v = 0; v < 4; ++v) {
    Bindings p = b, m = b;
    p[std::size_t(v)] += e;
    m[std::size_t(v)] -= e;
    CHECK(h.d[std::size_t(v)] == doctest::Approx((f.value(p) - f.value(m)) / (2 * e)).epsilon(1e-7));
    const Gradient gp = f.gradient(p), gm = f.gradient(m);
    for (int w = 0; w < 4; ++w) {
      CHECK(h.dd[std::size_t(v)][std::size_t(w)] ==
            doctest::Approx((gp.d[std::size_t(w)] - gm.d[std::size_t(w)]) / (2 * e)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("bump profile") {
  CHECK(bump_value(0.0, 1.0, 0) == doctest::Approx(1.0));
  CHECK(bump_value(1.0, 1.0, 0) == 0.0);
  CHECK(bump_value(-0.5, 1.0, 0) == 1.0);
  const double e = 1e-6;
  CHECK(bump_value(0.4, 1.0, 1) ==
        doctest::Approx((bump_value(0.4 + e, 1.0, 0) - bump_value(0.4 - e, 1.0, 0)) / (2 * e)).epsilon(1e-7));
}

TEST_CASE("parse faults") {
  CHECK(thrown_kind([] { parse("x +"); }) == ErrorKind::SyntaxError);
  CHECK(thrown_kind([] { parse("sinh(x)"); }) == ErrorKind::SyntaxError);
  CHECK(thrown_kind([] { parse("w + x"); }) == ErrorKind::UnknownVariable);
  CHECK(thrown_kind([] { parse("1/x"); }) == ErrorKind::UnguardedDivision);
  CHECK(thrown_kind([] { parse("bump(x; -1)"); }) == ErrorKind::SyntaxError);
  ParseOptions o;
  o.admitted = VarSet::of({Var::X, Var::Y});
  CHECK(thrown_kind([&] { parse("x + t", o); }) == ErrorKind::UnknownVariable);
  CHECK_NOTHROW(parse("1/(1 + x^2)"));
}

TEST_CASE("guards are enforced at evaluation") {
  const ScalarField f = ScalarField::parse("sqrt(x - 1)");
  CHECK(thrown_kind([&] { f.value({0.5, 0, 0, 0}); }) == ErrorKind::DomainError);
  ParseOptions o;
  o.domain.lo[0] = 0.5;
  const ScalarField g = ScalarField::parse("1/x", o);
  CHECK(g.value({2.0, 0, 0, 0}) == 0.5);
  CHECK(thrown_kind([&] { g.value({-1.0, 0, 0, 0}); }) == ErrorKind::DomainError);
}
