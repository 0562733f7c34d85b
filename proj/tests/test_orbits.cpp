#include <cmath>

#include "hoferlab/catalog.hpp"
#include "hoferlab/orbits.hpp"
#include "support.hpp"

using namespace hoferlab;
using Eigen::Vector3d;

TEST_CASE("periods of the rotation") {
  const HamiltonianPath R = catalog::rotation(3.0);
  ReturnOptions o;
  o.horizon = 3.0;
  const auto p = minimal_positive_period(R, Vector3d(0.4, 0.2, 0.0), o);
  REQUIRE(p);
  CHECK(*p == doctest::Approx(2 * M_PI / 3.0).epsilon(1e-9));
  CHECK_FALSE(minimal_positive_period(R, Vector3d::Zero()).has_value());
}

TEST_CASE("short orbit scan") {
  const auto w = has_short_orbit(catalog::rotation(4 * M_PI));
  REQUIRE(w);
  CHECK(w->period == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(has_short_orbit(catalog::rotation(M_PI)).has_value());
}

TEST_CASE("radial period against a finite-difference oracle") {
  const HamiltonianPath Q = catalog::quartic();
  for (double r : {0.2, 0.45, 0.6}) {
    const double e = 1e-6;
    const double dH = (Q.raw(Vector3d(r + e, 0, 0), 0) - Q.raw(Vector3d(r - e, 0, 0), 0)) / (2 * e);
    CHECK(radial_period(Q, r) == doctest::Approx(2 * M_PI * r / std::fabs(dH)).epsilon(1e-6));
    const auto p = minimal_positive_period(Q, Vector3d(r, 0, 0));
    if (p) CHECK(*p == doctest::Approx(radial_period(Q, r)).epsilon(1e-6));
  }
}

TEST_CASE("rigidity probe") {
  const RigidityReport q = rigidity_probe(catalog::quartic(), Vector3d::Zero());
  CHECK(q.verdict == "witness found");
  REQUIRE(q.linear_period);
  CHECK(*q.linear_period == doctest::Approx(0.5).epsilon(1e-6));  // Hess = 4 pi I
  CHECK(rigidity_probe(catalog::rotation(M_PI), Vector3d::Zero()).verdict == "criterion silent");
  CHECK(thrown_kind([] { rigidity_probe(catalog::quartic(), Vector3d(0.3, 0, 0)); }) ==
        ErrorKind::PreconditionFailed);
}

TEST_CASE("orbit classification needs an autonomous path") {
  CHECK(thrown_kind([] { classify_orbit(catalog::traveling_bump(), Vector3d(0.1, 0, 0)); }) ==
        ErrorKind::PreconditionFailed);
  CHECK(classify_orbit(catalog::rotation(1.0), Vector3d::Zero()).classification == OrbitClass::Constant);
}
