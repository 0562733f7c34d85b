#include <cmath>

#include "hoferlab/catalog.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/quadrature.hpp"
#include "support.hpp"

using namespace hoferlab;

TEST_CASE("length of a separable path") {
  // H = a(t) g(x) with osc g = 1: L = int |a|
  const HamiltonianPath H =
      HamiltonianPath::parse(Surface::plane(), "cos(6.283185307179586*t)*bump(x^2 + y^2; 1)", Box{-1.5, 1.5, -1.5, 1.5});
  CHECK(length(H) == doctest::Approx(2.0 / M_PI).epsilon(1e-8));
  CHECK(sup_norm(H) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("length of the zero path") {
  CHECK(length(HamiltonianPath::parse(Surface::plane(), "0")) == 0.0);
}

TEST_CASE("Calabi invariant of a bump") {
  const double delta = 0.3;
  const HamiltonianPath B = catalog::small_bump(delta);
  // int bump(r^2) dA = pi int_0^1 bump(s) ds
  const double oracle =
      quad::integrate([](double s) { return M_PI * expr::bump_value(s, 1.0, 0); }, 0.0, 1.0, 1e-13, 1e-13).value;
  CHECK(calabi(B).value == doctest::Approx(delta * oracle).epsilon(1e-8));
}

TEST_CASE("fixed extrema") {
  CHECK(fixed_extrema(catalog::peaked_bump(), 0.0, 1.0).has_value());
  CHECK_FALSE(fixed_extrema(catalog::traveling_bump(), 0.0, 1.0).has_value());
}

TEST_CASE("geodesic criterion") {
  CHECK(geodesic_check(catalog::peaked_bump()).satisfies_criterion);
  CHECK_FALSE(geodesic_check(catalog::traveling_bump()).satisfies_criterion);
  CHECK(thrown_kind([] { geodesic_check(HamiltonianPath::parse(Surface::plane(), "0")); }) == ErrorKind::NotRegular);
}

TEST_CASE("norm bracket") {
  const HamiltonianPath H = catalog::slow_bump();
  const NormBracket b = norm_bracket(H, CapacityBound{1.0, "test", H.fingerprint()});
  CHECK(b.upper == doctest::Approx(1.0));
  CHECK(b.equality);
  CHECK(thrown_kind([&] { norm_bracket(H, CapacityBound{1.0, "test", "other"}); }) == ErrorKind::MismatchedEndpoint);
}

TEST_CASE("extrema on the sphere") {
  const HamiltonianPath H = catalog::sphere_height(4.0);
  CHECK(H.oscillation(0.3) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(length(H) == doctest::Approx(4.0).epsilon(1e-10));
}
