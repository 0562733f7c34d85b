#include <cmath>

#include "hoferlab/catalog.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/quasicyl.hpp"
#include "support.hpp"

using namespace hoferlab;

TEST_CASE("thickening window") {
  CHECK(thickening_window(0.0, 0.1) == doctest::Approx(0.0));
  CHECK(thickening_window(0.5, 0.1) == doctest::Approx(1.0));
  CHECK(thrown_kind([] { thicken(catalog::slow_bump(), -1.0); }) == ErrorKind::PreconditionFailed);
}

TEST_CASE("gluing is symplectic") {
  const auto pairs = catalog::homotopic_pairs();
  const QuasiCylinder Q = glue(pairs[0].H, pairs[0].K, 0.05);
  CHECK(verify_gluing_symplectic(Q, 150).max_residual < 1e-5);
  const QuasiCylinder S = glue(pairs[2].K, pairs[2].K, 0.05);
  CHECK(S.identical());
  CHECK(verify_gluing_symplectic(S, 150).max_residual < 1e-10);
}

TEST_CASE("fibre areas agree") {
  const auto p = catalog::homotopic_pairs()[2];
  const AreaReport a = area(glue(p.H, p.K, 0.05), 8);
  CHECK(a.max_deviation < 1e-5);
  const AreaReport s = area(glue(p.K, p.K, 0.05), 8);
  CHECK(s.area == doctest::Approx(length(p.K) + 0.05).epsilon(1e-7));
}

TEST_CASE("area identity") {
  const auto p = catalog::homotopic_pairs()[1];
  const double nu = 0.05;
  const CompareReport c = compare(p.H, p.K, nu, 8);
  CHECK(c.identity_error < 1e-5);
  CHECK(c.area_HK + c.area_KH == doctest::Approx(c.length_H + c.length_K + 2 * nu).epsilon(1e-5));
}

TEST_CASE("gluing faults") {
  const Box box{-1.3, 1.3, -1.3, 1.3};
  const HamiltonianPath K = HamiltonianPath::parse(Surface::plane(), "0.8*bump(x^2 + y^2; 1)", box);
  const HamiltonianPath K2 = HamiltonianPath::parse(Surface::plane(), "0.9*bump(x^2 + y^2; 1)", box);
  CHECK(thrown_kind([&] { glue(K, K2, 0.05); }) == ErrorKind::EndpointMismatch);
  GlueOptions o;
  o.check_endpoints = false;
  CHECK(thrown_kind([&] { area(glue(K, K2, 0.05, o), 8); }) == ErrorKind::InconsistentArea);
  CHECK(thrown_kind([&] { glue(K, K, 0.0); }) == ErrorKind::PreconditionFailed);
  CHECK(thrown_kind([] { glue(catalog::sphere_height(4.0), catalog::sphere_height(4.0), 0.1); }) ==
        ErrorKind::PreconditionFailed);
}
